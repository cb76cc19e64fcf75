//! The subset-extraction pipeline: a closed subset Z of the ambient tree with
//! H̃^s_{n0}(Z) ≥ c and, stage by stage, H̃^s_n(Z) < c + 2^{-n} at a recorded
//! block.

use super::interpolate::{interpolate_in, Budget, Target};
use super::thin::{thinify_in, ThinParams};
use crate::dag::{DagCode, Forest, NodeId};
use crate::error::{Error, Result};
use crate::measure::{htilde_value, Premeasure};
use crate::trees::TreeSource;
use crate::weights::{AlgebraicWeight, Dyadic, Exponent};
use serde::{Deserialize, Serialize};

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct BesicovitchConfig {
    /// Deepest block materialized and checked.
    pub horizon: u32,
    /// Premeasure evaluations allowed per stage.
    pub budget: u64,
    /// θ_n = (d_n − c) / 2^{n + theta_shift}.
    pub theta_shift: u32,
}

impl Default for BesicovitchConfig {
    fn default() -> Self {
        BesicovitchConfig { horizon: 64, budget: 1_000_000, theta_shift: 3 }
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Check {
    pub block: u32,
    pub value: AlgebraicWeight,
    pub verdict: bool,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct RefinementCertificate {
    pub stage: u32,
    /// The stage's code through the horizon.
    pub code: DagCode,
    /// Depth through which later stages leave the code unchanged.
    pub prefix_depth: u32,
    /// H̃^s_{n0} ≥ c.
    pub lower_checks: Vec<Check>,
    /// H̃^s_n < d_n.
    pub upper_witness: Check,
    pub theta: AlgebraicWeight,
    pub d: AlgebraicWeight,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Extraction {
    pub code: DagCode,
    pub s: Exponent,
    pub c: AlgebraicWeight,
    pub n0: u32,
    pub certificates: Vec<RefinementCertificate>,
    pub evaluations: u64,
}

/// d_n = c + 2^{-n}.
pub fn stage_bound(c: &AlgebraicWeight, n: u32) -> AlgebraicWeight {
    c + &AlgebraicWeight::from_dyadic(Dyadic::pow2_neg(n))
}

fn stage_theta(c: &AlgebraicWeight, n: u32, shift: u32) -> AlgebraicWeight {
    (&stage_bound(c, n) - c).mul_dyadic(&Dyadic::pow2_neg(n + shift))
}

fn find_upper(
    f: &Forest,
    z: Option<NodeId>,
    s: Exponent,
    n: u32,
    from: u32,
    horizon: u32,
    d: &AlgebraicWeight,
    budget: &mut Budget,
) -> Result<Option<(u32, AlgebraicWeight)>> {
    for k in from..=horizon {
        budget.spend(1)?;
        let v = Premeasure::new(s, n, k).value(f, z);
        if v < *d {
            return Ok(Some((k, v)));
        }
    }
    Ok(None)
}

/// Run stages n0 .. n0 + stages over the pruned ambient tree of `src`.
pub fn besicovitch_extract(
    src: &dyn TreeSource,
    s: Exponent,
    c: &AlgebraicWeight,
    n0: u32,
    stages: u32,
    config: &BesicovitchConfig,
) -> Result<Extraction> {
    if s.is_zero() {
        return Err(Error::InvalidArgument("extraction needs s > 0".into()));
    }
    let h = config.horizon;
    if n0 > h {
        return Err(Error::HorizonExceeded { needed: n0, horizon: h });
    }
    let mut f = Forest::new();
    let mut z = f.ambient(src, h, true)?;
    let lower = Premeasure::new(s, n0, h).value(&f, z);
    if lower < *c {
        return Err(Error::PreconditionMeasure { block: h, value: lower.decimal(30) });
    }
    let mut p = n0;
    let mut certificates = Vec::new();
    let mut evaluations = 1;
    for n in n0..n0 + stages {
        let mut budget = Budget::new(config.budget, n);
        let d = stage_bound(c, n);
        let theta = stage_theta(c, n, config.theta_shift);
        let mut hit = find_upper(&f, z, s, n, p, h, &d, &mut budget)?;
        if hit.is_none() {
            let eps0 = (&d - c).mul_dyadic(&Dyadic::pow2_neg(1));
            let target = Target { s, n: n0, c: c.clone(), eps: eps0 };
            z = interpolate_in(&mut f, z, h, p, &target, None, &mut budget)?.root;
            for j in n0..n {
                let params = ThinParams { s, n: j, n0, c: c.clone(), theta: theta.clone() };
                z = thinify_in(&mut f, z, h, p, &params, &mut budget)?.root;
            }
            hit = find_upper(&f, z, s, n, p, h, &d, &mut budget)?;
        }
        let Some((k, upper)) = hit else {
            return Err(Error::NoStableIndex { window: h - p });
        };
        let lower = Premeasure::new(s, n0, h).value(&f, z);
        budget.spend(1)?;
        evaluations += budget.used;
        certificates.push(RefinementCertificate {
            stage: n,
            code: f.export(z, h),
            prefix_depth: p.max(k),
            lower_checks: vec![Check { block: h, verdict: lower >= *c, value: lower }],
            upper_witness: Check { block: k, verdict: upper < d, value: upper },
            theta,
            d,
        });
        p = p.max(k);
    }
    Ok(Extraction { code: f.export(z, h), s, c: c.clone(), n0, certificates, evaluations })
}

/// Recompute one certificate's verdicts against `code`.
pub fn check_certificate(code: &DagCode, cert: &RefinementCertificate, s: Exponent, c: &AlgebraicWeight, n0: u32) -> bool {
    let lower_ok = cert.lower_checks.iter().all(|l| {
        let v = htilde_value(code, l.block, s, n0);
        v == l.value && (v >= *c) == l.verdict && l.verdict
    });
    let u = &cert.upper_witness;
    let v = htilde_value(code, u.block, s, cert.stage);
    lower_ok && v == u.value && (v < cert.d) == u.verdict && u.verdict && cert.d == stage_bound(c, cert.stage)
}

/// Every certificate holds exactly on its own code. On the final code the
/// upper witness is unchanged and the lower bound is recomputed.
pub fn verify_extraction(ex: &Extraction) -> Vec<bool> {
    ex.certificates
        .iter()
        .map(|cert| {
            let u = &cert.upper_witness;
            check_certificate(&cert.code, cert, ex.s, &ex.c, ex.n0)
                && htilde_value(&ex.code, u.block, ex.s, cert.stage) == u.value
                && cert.lower_checks.iter().all(|l| htilde_value(&ex.code, l.block, ex.s, ex.n0) >= ex.c)
                && ex.code.truncated(cert.prefix_depth) == cert.code.truncated(cert.prefix_depth)
        })
        .collect()
}
