use std::fmt;

/// Errors raised by field, curve and basis construction routines.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Error {
    /// Division or inversion of zero in a field.
    DivisionByZero,
    /// Inversion of a zero field extension element.
    ZeroInversion,
    /// Vectors of different lengths fed to a componentwise operation.
    LengthMismatch { left: usize, right: usize },
    /// The vector is not invertible in F_q[Z/dZ].
    NotInvertible,
    /// The given integer is not prime.
    NotPrime(u64),
    /// The given integer is not a prime power.
    NotPrimePower(u64),
    /// A polynomial expected to be irreducible is not.
    NotIrreducible,
    /// A point does not satisfy the curve equation.
    PointNotOnCurve,
    /// The curve has zero discriminant.
    SingularCurve,
    /// Point counting was requested for a field above the configured bound.
    BoundExceeded { q: u64, bound: u64 },
    /// No point of the requested order exists (or none was found).
    NoSuchPoint { order: u64 },
    /// The kernel point fed to the quotient isogeny does not generate a cyclic
    /// group of the stated order.
    KernelNotCyclic,
    /// u_{A,B} requested with A = B.
    EqualPoints,
    /// Gamma(A, B, C) requested with fewer than two distinct points.
    TooFewDistinctPoints,
    /// A function was evaluated at one of its poles.
    PoleEvaluation,
    /// No suitable point a on the quotient curve was found.
    NoSuitableA,
    /// Neither y-root of the Weierstrass quadratic satisfies phi(b) = b + k*t.
    FrobeniusMismatch,
    /// The point R fails d*R != O.
    BadR,
    /// The fast conversion bridge requires odd extension degree.
    EvenDegree(usize),
    /// 2*d*a = O, so the polynomial bridge cannot be built.
    TwoTorsionObstruction,
    /// A linear system that should be regular turned out singular.
    SingularSystem,
    /// An exact polynomial division left a remainder.
    InexactDivision,
    /// The base-change search exceeded its cap.
    SearchCapExceeded { cap: u64 },
    /// Construction retries exhausted.
    SearchExhausted(&'static str),
    /// Malformed serialized data.
    Malformed(String),
}

impl fmt::Display for Error {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Error::DivisionByZero => write!(f, "division by zero"),
            Error::ZeroInversion => write!(f, "inversion of zero"),
            Error::LengthMismatch { left, right } => {
                write!(f, "length mismatch: {} vs {}", left, right)
            }
            Error::NotInvertible => write!(f, "vector is not invertible modulo x^d - 1"),
            Error::NotPrime(p) => write!(f, "{} is not prime", p),
            Error::NotPrimePower(q) => write!(f, "{} is not a prime power", q),
            Error::NotIrreducible => write!(f, "polynomial is not irreducible"),
            Error::PointNotOnCurve => write!(f, "point is not on the curve"),
            Error::SingularCurve => write!(f, "curve discriminant is zero"),
            Error::BoundExceeded { q, bound } => {
                write!(f, "field size {} exceeds point counting bound {}", q, bound)
            }
            Error::NoSuchPoint { order } => write!(f, "no point of order {} found", order),
            Error::KernelNotCyclic => write!(f, "kernel point does not generate a cyclic group"),
            Error::EqualPoints => write!(f, "u_(A,B) requires A != B"),
            Error::TooFewDistinctPoints => {
                write!(f, "gamma requires at least two distinct points")
            }
            Error::PoleEvaluation => write!(f, "evaluation at a pole"),
            Error::NoSuitableA => write!(f, "no suitable point a on the quotient curve"),
            Error::FrobeniusMismatch => {
                write!(f, "no y-root satisfies phi(b) = b + k*t; construction is inconsistent")
            }
            Error::BadR => write!(f, "point R fails d*R != O"),
            Error::EvenDegree(d) => write!(f, "degree {} is even; the bridge needs odd d", d),
            Error::TwoTorsionObstruction => write!(f, "2*d*a = O obstructs the bridge"),
            Error::SingularSystem => write!(f, "linear system is singular"),
            Error::InexactDivision => write!(f, "exact polynomial division left a remainder"),
            Error::SearchCapExceeded { cap } => {
                write!(f, "base change search exceeded cap {}", cap)
            }
            Error::SearchExhausted(what) => write!(f, "search exhausted: {}", what),
            Error::Malformed(msg) => write!(f, "malformed data: {}", msg),
        }
    }
}

impl std::error::Error for Error {}

pub type Result<T> = std::result::Result<T, Error>;
