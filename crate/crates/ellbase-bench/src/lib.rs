//! Shared setup for the criterion benchmarks: prebuilt contexts at a few
//! representative sizes.

use ellbase::*;

pub struct BenchSetup {
    pub theta: ThetaContext,
    pub psi_ok: bool,
}

pub fn setup(q: u64, d: usize) -> BenchSetup {
    let k = BaseField::of_order(q).expect("prime power");
    let mut rng = SplitMix64::new(q ^ ((d as u64) << 3));
    let model = CurveModel::applicable(k.p())[0];
    let ctx = model.find_context(&k, d, &mut rng).expect("constructible");
    let psi_ok = d % 2 == 1 && ctx.two_db_nonzero;
    let theta = ThetaContext::build(ctx, None, 7).expect("theta");
    BenchSetup { theta, psi_ok }
}
