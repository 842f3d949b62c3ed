//! The operation-count table: measured tallies against the closed forms,
//! per degree and curve model.

use std::time::Instant;

use ellbase::counters::{epsilon, frobenius_formulas, mult_formulas};
use ellbase::*;

pub struct BenchRow {
    pub q: u64,
    pub d: usize,
    pub model: &'static str,
    pub epsilon: u64,
    pub adds: u64,
    pub mults: u64,
    pub invs: u64,
    pub adds_expected: u64,
    pub mults_expected: u64,
    pub invs_expected: u64,
    pub counters_match: bool,
    pub frob_match: bool,
    pub theta_convolutions: Option<u64>,
    pub mult_ns: u128,
    pub skipped: Option<String>,
}

pub fn header() -> String {
    "q,d,model,epsilon,adds,mults,invs,adds_expected,mults_expected,invs_expected,\
     counters_match,frobenius_match,theta_convolutions,mult_ns,skipped"
        .to_string()
}

pub fn format_row(r: &BenchRow) -> String {
    format!(
        "{},{},{},{},{},{},{},{},{},{},{},{},{},{},{}",
        r.q,
        r.d,
        r.model,
        r.epsilon,
        r.adds,
        r.mults,
        r.invs,
        r.adds_expected,
        r.mults_expected,
        r.invs_expected,
        r.counters_match,
        r.frob_match,
        r.theta_convolutions.map_or("-".to_string(), |c| c.to_string()),
        r.mult_ns,
        r.skipped.as_deref().unwrap_or("-"),
    )
}

pub fn run_cell(q: u64, d: usize, model: CurveModel, reps: u64, seed: u64) -> BenchRow {
    let eps = epsilon(d as u64);
    let (ea, em, ei) = mult_formulas::charged(d as u64, model.a1_shape(), model.a3_nonzero());
    let mut row = BenchRow {
        q,
        d,
        model: model.name(),
        epsilon: eps,
        adds: 0,
        mults: 0,
        invs: 0,
        adds_expected: ea,
        mults_expected: em,
        invs_expected: ei,
        counters_match: false,
        frob_match: false,
        theta_convolutions: None,
        mult_ns: 0,
        skipped: None,
    };
    let k = match BaseField::of_order(q) {
        Ok(k) => k,
        Err(e) => {
            row.skipped = Some(format!("field: {e}"));
            return row;
        }
    };
    if !model.is_applicable(k.p()) {
        row.skipped = Some("model not applicable in this characteristic".into());
        return row;
    }
    let mut rng = SplitMix64::new(seed ^ (q << 8) ^ d as u64);
    let ctx = match model.find_context(&k, d, &mut rng) {
        Ok(c) => c,
        Err(e) => {
            row.skipped = Some(format!("{e}"));
            return row;
        }
    };
    let mut all_match = true;
    let mut frob_match = true;
    let mut total_ns = 0u128;
    for _ in 0..reps.max(1) {
        let va = ctx.random_vector(Basis::Omega, &mut rng);
        let vb = ctx.random_vector(Basis::Omega, &mut rng);
        let t0 = Instant::now();
        let (_, tally) = ctx.multiply(&va, &vb);
        total_ns += t0.elapsed().as_nanos();
        // charged sums per the model row
        let adds = tally.total_adds();
        let mults = match model.a1_shape() {
            counters::A1Shape::One => tally.mults,
            _ => tally.total_mults(),
        };
        row.adds = adds;
        row.mults = mults;
        row.invs = tally.invs;
        if (adds, mults, tally.invs) != (ea, em, ei) {
            all_match = false;
        }
        let (_, ft) = ctx.frobenius(&va);
        let (fa, fm) = frobenius_formulas::charged(d as u64, model.a1_shape());
        if (ft.total_adds(), ft.total_mults()) != (fa, fm) {
            frob_match = false;
        }
    }
    row.counters_match = all_match;
    row.frob_match = frob_match;
    row.mult_ns = total_ns / reps.max(1) as u128;
    // a theta context on top, to record the convolution count
    if let Ok(th) = ThetaContext::build(ctx, None, seed) {
        let va = th.omega.random_vector(Basis::Theta, &mut rng);
        let vb = th.omega.random_vector(Basis::Theta, &mut rng);
        let (_, tally) = th.multiply(&va, &vb);
        row.theta_convolutions = Some(tally.convolutions);
    }
    row
}
