//! Versioned JSON bundles for constructed contexts. All integers are decimal
//! strings; field elements are coefficient arrays, low degree first.

use serde::{Deserialize, Serialize};

use crate::conv::ConvolutionStrategy;
use crate::curve::{CurvePoint, Point, WeierstrassCurve};
use crate::error::{Error, Result};
use crate::field::{BaseField, BaseFieldElement};
use crate::omega::{Basis, CoordVector, OmegaContext};
use crate::poly::Polynomial;
use crate::psi::PsiContext;
use crate::theta::ThetaContext;

pub const BUNDLE_VERSION: u32 = 1;

pub type ElemJson = Vec<String>;
pub type PolyJson = Vec<ElemJson>;

#[derive(Debug, Clone, Serialize, Deserialize, PartialEq)]
pub struct FieldJson {
    pub p: String,
    pub m: usize,
    /// Modulus coefficients, low to high (length m+1).
    pub g: Vec<String>,
}

#[derive(Debug, Clone, Serialize, Deserialize, PartialEq)]
pub struct CurveJson {
    pub a1: ElemJson,
    pub a2: ElemJson,
    pub a3: ElemJson,
    pub a4: ElemJson,
    pub a6: ElemJson,
}

#[derive(Debug, Clone, Serialize, Deserialize, PartialEq)]
#[serde(untagged)]
pub enum PointJson {
    Infinity(String),
    Affine([ElemJson; 2]),
}

#[derive(Debug, Clone, Serialize, Deserialize, PartialEq)]
pub struct IsogenyJson {
    pub x_num: PolyJson,
    pub x_den: PolyJson,
    pub y_num1: PolyJson,
    pub y_num0: PolyJson,
    pub y_den: PolyJson,
}

#[derive(Debug, Clone, Serialize, Deserialize, PartialEq)]
pub struct ThetaJson {
    pub r_point: PointJson,
    pub frak_c: ElemJson,
    pub frak_a: ElemJson,
    pub frak_b: ElemJson,
    pub lambda: PolyJson,
    pub iota: PolyJson,
    pub u_r: PolyJson,
    pub u_r_inv: PolyJson,
    pub x_r: PolyJson,
}

#[derive(Debug, Clone, Serialize, Deserialize, PartialEq)]
pub struct PsiJson {
    pub y1: PolyJson,
    pub y0: PolyJson,
    pub m_poly: PolyJson,
    pub d_poly: PolyJson,
    pub s: PolyJson,
    pub dk_at_nuk: PolyJson,
}

#[derive(Debug, Clone, Serialize, Deserialize, PartialEq)]
pub struct BaseChangeJson {
    pub q: String,
    pub d: String,
    pub f: String,
    pub f_inverse: String,
    pub q_big: String,
}

/// The full serialized context.
#[derive(Debug, Clone, Serialize, Deserialize, PartialEq)]
pub struct ContextBundle {
    pub version: u32,
    pub field: FieldJson,
    pub d: usize,
    pub curve: CurveJson,
    pub t: PointJson,
    pub a: PointJson,
    pub e_prime: CurveJson,
    pub isogeny: IsogenyJson,
    pub pi: PolyJson,
    pub y_b: PolyJson,
    pub nu: PolyJson,
    pub rho: PolyJson,
    pub kappa: PolyJson,
    pub phi_xi0_first: PolyJson,
    pub gamma_row: PolyJson,
    pub gamma_col: PolyJson,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub theta: Option<ThetaJson>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub psi: Option<PsiJson>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub base_change: Option<BaseChangeJson>,
}

// -- encoding helpers --------------------------------------------------------

pub fn elem_json(e: &BaseFieldElement) -> ElemJson {
    e.0.iter().map(|c| c.to_string()).collect()
}

pub fn elem_from_json(k: &BaseField, j: &[String]) -> Result<BaseFieldElement> {
    let coeffs = j
        .iter()
        .map(|s| s.parse::<u64>().map_err(|_| Error::Malformed(format!("bad integer {s}"))))
        .collect::<Result<Vec<u64>>>()?;
    k.elem_from_coeffs(coeffs)
}

pub fn vec_json(v: &[BaseFieldElement]) -> PolyJson {
    v.iter().map(elem_json).collect()
}

pub fn vec_from_json(k: &BaseField, j: &[ElemJson]) -> Result<Vec<BaseFieldElement>> {
    j.iter().map(|e| elem_from_json(k, e)).collect()
}

pub fn poly_json(p: &Polynomial<BaseField>) -> PolyJson {
    vec_json(&p.coeffs)
}

pub fn poly_from_json(k: &BaseField, j: &[ElemJson]) -> Result<Polynomial<BaseField>> {
    Ok(Polynomial::from_coeffs(k, vec_from_json(k, j)?))
}

pub fn point_json(p: &Point) -> PointJson {
    match p {
        CurvePoint::Infinity => PointJson::Infinity("O".into()),
        CurvePoint::Affine(x, y) => PointJson::Affine([elem_json(x), elem_json(y)]),
    }
}

pub fn point_from_json(k: &BaseField, j: &PointJson) -> Result<Point> {
    match j {
        PointJson::Infinity(s) if s == "O" => Ok(CurvePoint::Infinity),
        PointJson::Infinity(s) => Err(Error::Malformed(format!("bad point {s}"))),
        PointJson::Affine([x, y]) => {
            Ok(CurvePoint::Affine(elem_from_json(k, x)?, elem_from_json(k, y)?))
        }
    }
}

pub fn curve_json(e: &WeierstrassCurve<BaseField>) -> CurveJson {
    CurveJson {
        a1: elem_json(&e.a1),
        a2: elem_json(&e.a2),
        a3: elem_json(&e.a3),
        a4: elem_json(&e.a4),
        a6: elem_json(&e.a6),
    }
}

pub fn curve_from_json(k: &BaseField, j: &CurveJson) -> Result<WeierstrassCurve<BaseField>> {
    WeierstrassCurve::new(
        k.clone(),
        elem_from_json(k, &j.a1)?,
        elem_from_json(k, &j.a2)?,
        elem_from_json(k, &j.a3)?,
        elem_from_json(k, &j.a4)?,
        elem_from_json(k, &j.a6)?,
    )
}

pub fn field_json(k: &BaseField) -> FieldJson {
    FieldJson {
        p: k.p().to_string(),
        m: k.m(),
        g: k.modulus().iter().map(|c| c.to_string()).collect(),
    }
}

pub fn field_from_json(j: &FieldJson) -> Result<BaseField> {
    let p = j.p.parse::<u64>().map_err(|_| Error::Malformed("bad prime".into()))?;
    let modulus = j
        .g
        .iter()
        .map(|s| s.parse::<u64>().map_err(|_| Error::Malformed("bad modulus".into())))
        .collect::<Result<Vec<u64>>>()?;
    if j.m == 1 {
        BaseField::prime_field(p)
    } else {
        let f = BaseField::with_modulus(p, modulus)?;
        if f.m() != j.m {
            return Err(Error::Malformed("modulus degree mismatch".into()));
        }
        Ok(f)
    }
}

// -- bundle construction -------------------------------------------------

pub fn bundle_from_contexts(
    omega: &OmegaContext,
    theta: Option<&ThetaContext>,
    psi: Option<&PsiContext>,
    base_change: Option<BaseChangeJson>,
) -> ContextBundle {
    ContextBundle {
        version: BUNDLE_VERSION,
        field: field_json(&omega.fq),
        d: omega.d,
        curve: curve_json(&omega.curve),
        t: point_json(&omega.t),
        a: point_json(&omega.a),
        e_prime: curve_json(&omega.isogeny.codomain),
        isogeny: IsogenyJson {
            x_num: poly_json(&omega.isogeny.x_num),
            x_den: poly_json(&omega.isogeny.x_den),
            y_num1: poly_json(&omega.isogeny.y_num1),
            y_num0: poly_json(&omega.isogeny.y_num0),
            y_den: poly_json(&omega.isogeny.y_den),
        },
        pi: poly_json(&omega.pi),
        y_b: vec_json(&omega.y_b),
        nu: vec_json(&omega.nu[1..]),
        rho: vec_json(&omega.rho[1..]),
        kappa: vec_json(&omega.kappa),
        phi_xi0_first: vec_json(&omega.phi_xi0_first),
        gamma_row: vec_json(&omega.gamma_last_row),
        gamma_col: vec_json(&omega.gamma_last_col),
        theta: theta.map(|th| ThetaJson {
            r_point: point_json(&th.r_point),
            frak_c: elem_json(&th.frak_c),
            frak_a: elem_json(&th.frak_a),
            frak_b: elem_json(&th.frak_b),
            lambda: vec_json(&th.lambda),
            iota: vec_json(&th.iota),
            u_r: vec_json(&th.u_r),
            u_r_inv: vec_json(&th.u_r_inv),
            x_r: vec_json(&th.x_r),
        }),
        psi: psi.map(|ps| PsiJson {
            y1: poly_json(&ps.y1),
            y0: poly_json(&ps.y0),
            m_poly: poly_json(&ps.m_poly),
            d_poly: poly_json(&ps.d_poly),
            s: vec_json(&ps.omega.s[1..]),
            dk_at_nuk: vec_json(&ps.dk_at_nuk[1..]),
        }),
        base_change,
    }
}

/// Reconstructed, revalidated working contexts from a bundle.
pub struct LoadedBundle {
    pub omega: OmegaContext,
    pub has_theta: bool,
    pub theta: Option<ThetaContext>,
    pub bundle: ContextBundle,
}

pub fn load_bundle(bundle: &ContextBundle) -> Result<LoadedBundle> {
    if bundle.version != BUNDLE_VERSION {
        return Err(Error::Malformed(format!("unsupported version {}", bundle.version)));
    }
    let k = field_from_json(&bundle.field)?;
    let e = curve_from_json(&k, &bundle.curve)?;
    let t = point_from_json(&k, &bundle.t)?;
    let a = point_from_json(&k, &bundle.a)?;
    if !e.contains(&t) {
        return Err(Error::PointNotOnCurve);
    }
    // rebuild from the recorded choices; everything derived is recomputed
    // and the recorded tables are cross-checked below
    let omega = OmegaContext::build(&e, &t, Some(a), 0)?;
    let expect_pi = poly_from_json(&k, &bundle.pi)?;
    if omega.pi != expect_pi {
        return Err(Error::Malformed("Pi mismatch".into()));
    }
    let kappa = vec_from_json(&k, &bundle.kappa)?;
    if omega.kappa != kappa {
        return Err(Error::Malformed("kappa mismatch".into()));
    }
    let recorded_t = point_from_json(&k, &bundle.t)?;
    if omega.t != recorded_t {
        return Err(Error::Malformed("t relabeling mismatch".into()));
    }
    let y_b = vec_from_json(&k, &bundle.y_b)?;
    if omega.y_b != y_b {
        return Err(Error::Malformed("y(b) root mismatch".into()));
    }
    let theta = match &bundle.theta {
        None => None,
        Some(tj) => {
            let r = point_from_json(&k, &tj.r_point)?;
            let th = ThetaContext::build_checked(omega_clone(&omega)?, r)?;
            if elem_json(&th.frak_c) != tj.frak_c
                || elem_json(&th.frak_a) != tj.frak_a
                || elem_json(&th.frak_b) != tj.frak_b
                || vec_json(&th.iota) != tj.iota
                || vec_json(&th.u_r) != tj.u_r
                || vec_json(&th.u_r_inv) != tj.u_r_inv
                || vec_json(&th.x_r) != tj.x_r
            {
                return Err(Error::Malformed("theta section mismatch".into()));
            }
            Some(th)
        }
    };
    Ok(LoadedBundle { omega, has_theta: theta.is_some(), theta, bundle: bundle.clone() })
}

fn omega_clone(omega: &OmegaContext) -> Result<OmegaContext> {
    OmegaContext::build(&omega.curve, &omega.t, Some(omega.a.clone()), 0)
}

/// Lenient load: the recorded tables are taken at face value so that the
/// verification suites (not the loader) catch corruption.
pub fn load_bundle_recorded(bundle: &ContextBundle) -> Result<LoadedBundle> {
    if bundle.version != BUNDLE_VERSION {
        return Err(Error::Malformed(format!("unsupported version {}", bundle.version)));
    }
    let k = field_from_json(&bundle.field)?;
    let e = curve_from_json(&k, &bundle.curve)?;
    let t = point_from_json(&k, &bundle.t)?;
    let a = point_from_json(&k, &bundle.a)?;
    let pi = poly_from_json(&k, &bundle.pi)?;
    let omega = OmegaContext::from_recorded(
        &e,
        t,
        a,
        pi,
        vec_from_json(&k, &bundle.y_b)?,
        vec_from_json(&k, &bundle.nu)?,
        vec_from_json(&k, &bundle.rho)?,
        vec_from_json(&k, &bundle.kappa)?,
        vec_from_json(&k, &bundle.phi_xi0_first)?,
        vec_from_json(&k, &bundle.gamma_row)?,
        vec_from_json(&k, &bundle.gamma_col)?,
    )?;
    let theta = match &bundle.theta {
        None => None,
        Some(tj) => {
            let omega2 = OmegaContext::from_recorded(
                &e,
                point_from_json(&k, &bundle.t)?,
                point_from_json(&k, &bundle.a)?,
                poly_from_json(&k, &bundle.pi)?,
                vec_from_json(&k, &bundle.y_b)?,
                vec_from_json(&k, &bundle.nu)?,
                vec_from_json(&k, &bundle.rho)?,
                vec_from_json(&k, &bundle.kappa)?,
                vec_from_json(&k, &bundle.phi_xi0_first)?,
                vec_from_json(&k, &bundle.gamma_row)?,
                vec_from_json(&k, &bundle.gamma_col)?,
            )?;
            Some(ThetaContext::from_recorded(
                omega2,
                point_from_json(&k, &tj.r_point)?,
                elem_from_json(&k, &tj.frak_c)?,
                elem_from_json(&k, &tj.frak_a)?,
                elem_from_json(&k, &tj.frak_b)?,
                vec_from_json(&k, &tj.lambda)?,
                vec_from_json(&k, &tj.iota)?,
                vec_from_json(&k, &tj.u_r)?,
                vec_from_json(&k, &tj.u_r_inv)?,
                vec_from_json(&k, &tj.x_r)?,
            )?)
        }
    };
    Ok(LoadedBundle { omega, has_theta: theta.is_some(), theta, bundle: bundle.clone() })
}

impl ThetaContext {
    /// Deterministic rebuild with an explicit R (bundle loading).
    pub fn build_checked(omega: OmegaContext, r: Point) -> Result<ThetaContext> {
        ThetaContext::build(omega, Some(r), 0)
    }
}

/// Parse a coordinate vector given in the CLI syntax: comma-separated
/// coordinates, each a /-separated list of F_p digits when m > 1.
pub fn parse_vector(k: &BaseField, d: usize, basis: Basis, text: &str) -> Result<CoordVector> {
    let parts: Vec<&str> = text.split(',').collect();
    if parts.len() != d {
        return Err(Error::LengthMismatch { left: parts.len(), right: d });
    }
    let coords = parts
        .iter()
        .map(|p| {
            let digits = p
                .split('/')
                .map(|s| {
                    s.trim()
                        .parse::<u64>()
                        .map_err(|_| Error::Malformed(format!("bad coordinate {s}")))
                })
                .collect::<Result<Vec<u64>>>()?;
            k.elem_from_coeffs(digits)
        })
        .collect::<Result<Vec<BaseFieldElement>>>()?;
    Ok(CoordVector::new(basis, coords))
}

pub fn format_vector(v: &CoordVector) -> String {
    v.coords
        .iter()
        .map(|c| {
            c.0.iter()
                .map(|d| d.to_string())
                .collect::<Vec<_>>()
                .join("/")
        })
        .collect::<Vec<_>>()
        .join(",")
}

pub fn strategy_name(s: ConvolutionStrategy) -> &'static str {
    match s {
        ConvolutionStrategy::Naive => "naive",
        ConvolutionStrategy::Karatsuba => "karatsuba",
    }
}
