//! Recovery-guarantee arithmetic for l1 - alpha l2 minimization under the
//! (l2, l1) restricted isometry property.
//!
//! Nothing here certifies a matrix. The evaluators take restricted isometry
//! constants as inputs and report whether the sufficient conditions hold and
//! how large the resulting error bounds are. [`brute_force_rip_l1`] gives
//! inner estimates of the constants for very small matrices.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::linalg::{norm1, norm2, SenseMatrix, SparseSignal};

/// Slack used by the inequality checkers.
pub const CHECK_SLACK: f64 = 1e-12;

/// Largest `n` and `s` accepted by [`brute_force_rip_l1`].
pub const RIP_MAX_COLS: usize = 14;
pub const RIP_MAX_ORDER: usize = 4;

#[derive(Debug, Error, PartialEq)]
pub enum TheoryError {
    #[error("precondition violated: {0}")]
    PreconditionViolated(String),
    #[error("condition fails: {0}")]
    ConditionFails(String),
    #[error("enumeration too large: n = {n}, s = {s} (limits n <= 14, s <= 4)")]
    TooLarge { n: usize, s: usize },
    #[error("invalid argument: {0}")]
    InvalidArgument(String),
}

/// Lower and upper (l2, l1) restricted isometry constants of one order.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct RipPair {
    pub s: usize,
    pub delta_lb: f64,
    pub delta_ub: f64,
}

impl RipPair {
    pub fn new(s: usize, delta_lb: f64, delta_ub: f64) -> Self {
        Self { s, delta_lb, delta_ub }
    }
}

/// `||x||_1 - alpha ||x||_2`
pub fn l1_minus_alpha_l2(x: &[f64], alpha: f64) -> f64 {
    norm1(x) - alpha * norm2(x)
}

/// Entries of `x` outside its `s` largest magnitudes, i.e. `x_{-max(s)}`.
/// Ties are broken by index so the split is deterministic.
pub fn split_largest(x: &[f64], s: usize) -> (Vec<f64>, Vec<f64>) {
    let mut order: Vec<usize> = (0..x.len()).collect();
    order.sort_by(|&i, &j| x[j].abs().total_cmp(&x[i].abs()).then(i.cmp(&j)));
    let mut head = vec![0.0; x.len()];
    let mut tail = x.to_vec();
    for &i in order.iter().take(s) {
        head[i] = x[i];
        tail[i] = 0.0;
    }
    (head, tail)
}

/// `||x_{-max(s)}||_1`, the best s-term approximation error in l1.
pub fn tail_norm(x: &[f64], s: usize) -> f64 {
    norm1(&split_largest(x, s).1)
}

/// Checks `(s - alpha sqrt(s)) min_j |x_j| <= ||x||_1 - alpha ||x||_2 <= (sqrt(s) - alpha) ||x||_2`
/// over the support of `x`. Both flags are expected to be `true` for every
/// nonzero input with `alpha` in `[0, 1]`.
pub fn check_lemma2_bounds(x: &SparseSignal, alpha: f64) -> (bool, bool) {
    let dense = x.to_dense();
    let s = x.sparsity() as f64;
    let mid = l1_minus_alpha_l2(&dense, alpha);
    let min_abs = x.values().iter().fold(f64::INFINITY, |m, v| m.min(v.abs()));
    let lower = (s - alpha * s.sqrt()) * min_abs;
    let upper = (s.sqrt() - alpha) * norm2(&dense);
    (lower <= mid + CHECK_SLACK, mid <= upper + CHECK_SLACK)
}

/// Result of the two cone-constraint inequalities for `h = x_hat - x`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct ConeCheck {
    /// `||h_-||_1 <= ||h_+||_1 + 2 ||x_-||_1 + alpha ||h||_2`
    pub first: bool,
    /// `||h_-||_1 - alpha ||h_-||_2 <= ||h_+||_1 + 2 ||x_-||_1 + alpha ||h_+||_2`
    pub second: bool,
}

impl ConeCheck {
    pub fn all(&self) -> bool {
        self.first && self.second
    }
}

/// Evaluates both cone inequalities, where `h_+` keeps the `s` largest
/// entries of `h`, `h_-` the rest and `x_-` the tail of `x` outside its `s`
/// largest entries. Requires `||x_hat||_{alpha,1-2} <= ||x||_{alpha,1-2}`.
pub fn check_cone_constraint(
    x: &[f64],
    x_hat: &[f64],
    s: usize,
    alpha: f64,
) -> Result<ConeCheck, TheoryError> {
    if x.len() != x_hat.len() {
        return Err(TheoryError::InvalidArgument("x and x_hat differ in length".into()));
    }
    let fx = l1_minus_alpha_l2(x, alpha);
    let fx_hat = l1_minus_alpha_l2(x_hat, alpha);
    if fx_hat > fx {
        return Err(TheoryError::PreconditionViolated(format!(
            "||x_hat||_(alpha,1-2) = {fx_hat} exceeds ||x||_(alpha,1-2) = {fx}"
        )));
    }
    let h: Vec<f64> = x_hat.iter().zip(x).map(|(a, b)| a - b).collect();
    let (h_head, h_tail) = split_largest(&h, s);
    let x_tail = tail_norm(x, s);
    let rhs_common = norm1(&h_head) + 2.0 * x_tail;
    let first = norm1(&h_tail) <= rhs_common + alpha * norm2(&h) + CHECK_SLACK;
    let second = norm1(&h_tail) - alpha * norm2(&h_tail)
        <= rhs_common + alpha * norm2(&h_head) + CHECK_SLACK;
    Ok(ConeCheck { first, second })
}

/// `a(s, t; alpha) = (sqrt(t) - alpha) / (sqrt(s) + alpha)`
pub fn a_const(s: f64, t: f64, alpha: f64) -> f64 {
    (t.sqrt() - alpha) / (s.sqrt() + alpha)
}

/// `b(s, k; alpha) = 8 (2 sqrt(ks) - alpha) / (17 alpha (2 sqrt(k) + 1))`
pub fn b_const(s: f64, k: f64, alpha: f64) -> f64 {
    8.0 * (2.0 * (k * s).sqrt() - alpha) / (17.0 * alpha * (2.0 * k.sqrt() + 1.0))
}

/// `rho = 1 - delta_lb_{(k+1)s} - (1 + delta_ub_{ks}) / a`
pub fn rho_const(delta_lb_k1s: f64, delta_ub_ks: f64, a_val: f64) -> f64 {
    1.0 - delta_lb_k1s - (1.0 + delta_ub_ks) / a_val
}

/// Inputs shared by the exact and stable recovery conditions.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct RecoveryParams {
    pub s: usize,
    /// Multiplier with `k s` integral.
    pub k: f64,
    pub alpha: f64,
    /// Constants of order `k s`.
    pub rip_ks: RipPair,
    /// Constants of order `(k + 1) s`.
    pub rip_k1s: RipPair,
}

impl RecoveryParams {
    pub fn validate(&self) -> Result<(), TheoryError> {
        if self.s == 0 {
            return Err(TheoryError::InvalidArgument("s must be positive".into()));
        }
        if !(self.k > 0.0) || !self.k.is_finite() {
            return Err(TheoryError::InvalidArgument("k must be positive".into()));
        }
        let ks = self.k * self.s as f64;
        if (ks - ks.round()).abs() > 1e-9 {
            return Err(TheoryError::InvalidArgument(format!("k s = {ks} is not an integer")));
        }
        if !(0.0..=1.0).contains(&self.alpha) {
            return Err(TheoryError::InvalidArgument("alpha must lie in [0, 1]".into()));
        }
        Ok(())
    }

    fn sf(&self) -> f64 {
        self.s as f64
    }

    /// `a(s, ks; alpha)`
    pub fn a(&self) -> f64 {
        a_const(self.sf(), self.k * self.sf(), self.alpha)
    }

    pub fn b(&self) -> f64 {
        b_const(self.sf(), self.k, self.alpha)
    }

    pub fn rho(&self) -> f64 {
        rho_const(self.rip_k1s.delta_lb, self.rip_ks.delta_ub, self.a())
    }
}

/// Verdicts of the exact-recovery condition and its simplified form.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Thm1Verdict {
    /// `a > 1` and `delta_ub_ks + a delta_lb_(k+1)s < a - 1`.
    pub holds: bool,
    pub a_val: f64,
    /// Whether `k >= 4 alpha^2 / (sqrt(s) - alpha)^2`, the regime in which the
    /// simplified condition applies.
    pub simplified_applicable: bool,
    /// `delta_ub_ks + (sqrt(k)/2) delta_lb_(k+1)s < sqrt(k)/2 - 1`
    pub simplified_holds: bool,
}

pub fn check_thm1_condition(p: &RecoveryParams) -> Result<Thm1Verdict, TheoryError> {
    p.validate()?;
    let a = p.a();
    let (ub, lb) = (p.rip_ks.delta_ub, p.rip_k1s.delta_lb);
    let holds = a > 1.0 && ub + a * lb < a - 1.0;
    let sqrt_s = p.sf().sqrt();
    let gap = sqrt_s - p.alpha;
    let simplified_applicable = gap > 0.0 && p.k >= 4.0 * p.alpha * p.alpha / (gap * gap);
    let half_sqrt_k = p.k.sqrt() / 2.0;
    let simplified_holds = ub + half_sqrt_k * lb < half_sqrt_k - 1.0;
    Ok(Thm1Verdict {
        holds,
        a_val: a,
        simplified_applicable,
        simplified_holds,
    })
}

/// Stable-recovery bound for the l1-constrained model with `||z||_1 <= eta1`:
///
/// ```text
/// 2 (2 sqrt(k) + 1) sqrt(s) / ((2 sqrt(ks) - alpha) rho) * eta1
///   + sqrt(s) / (2 sqrt(ks) - alpha)
///     * ((2 sqrt(k) + 1)(1 + delta_ub) sqrt(s) / (rho (sqrt(ks) - alpha)) + 1)
///     * 2 tail / sqrt(s)
/// ```
pub fn thm2_error_bound(p: &RecoveryParams, eta1: f64, tail: f64) -> Result<f64, TheoryError> {
    p.validate()?;
    let a = p.a();
    if !(a > 1.0) {
        return Err(TheoryError::ConditionFails(format!("a(s,ks;alpha) = {a} is not > 1")));
    }
    let rho = p.rho();
    if !(rho > 0.0) {
        return Err(TheoryError::ConditionFails(format!("rho_ks = {rho} is not > 0")));
    }
    let s = p.sf();
    let (sqrt_s, sqrt_k) = (s.sqrt(), p.k.sqrt());
    let sqrt_ks = (p.k * s).sqrt();
    let denom = 2.0 * sqrt_ks - p.alpha;
    let c = 2.0 * sqrt_k + 1.0;
    let noise_term = 2.0 * c * sqrt_s / (denom * rho) * eta1;
    let inner = c * (1.0 + p.rip_ks.delta_ub) * sqrt_s / (rho * (sqrt_ks - p.alpha)) + 1.0;
    let tail_term = sqrt_s / denom * inner * 2.0 * tail / sqrt_s;
    Ok(noise_term + tail_term)
}

/// Side conditions of the Dantzig-selector theorem.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Thm3Conditions {
    pub a_val: f64,
    pub b_val: f64,
    pub a_gt_2: bool,
    pub b_gt_1: bool,
    pub ab_lt_a_plus_b: bool,
    /// `(b+1) delta_ub_ks + a b delta_lb_(k+1)s < a b - b - 1`
    pub rip_condition: bool,
}

impl Thm3Conditions {
    pub fn all(&self) -> bool {
        self.a_gt_2 && self.b_gt_1 && self.ab_lt_a_plus_b && self.rip_condition
    }

    fn first_failure(&self) -> Option<&'static str> {
        if !self.a_gt_2 {
            Some("a(s,ks;alpha) > 2")
        } else if !self.b_gt_1 {
            Some("b(s,k;alpha) > 1")
        } else if !self.ab_lt_a_plus_b {
            Some("a b < a + b")
        } else if !self.rip_condition {
            Some("(b+1) delta_ub + a b delta_lb < a b - b - 1")
        } else {
            None
        }
    }
}

pub fn thm3_conditions(p: &RecoveryParams) -> Result<Thm3Conditions, TheoryError> {
    p.validate()?;
    let a = p.a();
    let b = p.b();
    let (ub, lb) = (p.rip_ks.delta_ub, p.rip_k1s.delta_lb);
    Ok(Thm3Conditions {
        a_val: a,
        b_val: b,
        a_gt_2: a > 2.0,
        b_gt_1: b > 1.0,
        ab_lt_a_plus_b: a * b < a + b,
        rip_condition: (b + 1.0) * ub + a * b * lb < a * b - b - 1.0,
    })
}

/// `varrho = (1 / (2 sqrt(k))) ((2 sqrt(k) + 1)(2 (1 + delta_ub) / (a rho) + eps / 2) + 1)`
/// with `eps = 2 (1 + delta_ub) / (8 a rho)`, which collapses to
/// `(1 / (2 sqrt(k))) (17 (2 sqrt(k) + 1)(1 + delta_ub) / (8 a rho) + 1)`.
///
/// With this value `varrho < sqrt(s) / alpha` is exactly the RIP side
/// condition of [`thm3_conditions`].
pub fn varrho(p: &RecoveryParams) -> f64 {
    let sqrt_k = p.k.sqrt();
    let num = 17.0 * (2.0 * sqrt_k + 1.0) * (1.0 + p.rip_ks.delta_ub);
    (num / (8.0 * p.a() * p.rho()) + 1.0) / (2.0 * sqrt_k)
}

/// Stable-recovery bound for the Dantzig-selector model with
/// `||A^T z||_inf <= eta2`, transcribed term by term (including the factor
/// `m s` on the noise term).
pub fn thm3_error_bound(
    p: &RecoveryParams,
    eta2: f64,
    m: usize,
    tail: f64,
) -> Result<f64, TheoryError> {
    let cond = thm3_conditions(p)?;
    if let Some(which) = cond.first_failure() {
        return Err(TheoryError::ConditionFails(which.to_string()));
    }
    let rho = p.rho();
    if !(rho > 0.0) {
        return Err(TheoryError::ConditionFails(format!("rho_ks = {rho} is not > 0")));
    }
    let s = p.sf();
    let sqrt_s = s.sqrt();
    let sqrt_k = p.k.sqrt();
    let vr = varrho(p);
    let gap = sqrt_s - p.alpha * vr;
    if !(gap > 0.0) {
        return Err(TheoryError::ConditionFails(format!(
            "sqrt(s) - alpha varrho = {gap} is not > 0"
        )));
    }
    let one_ub = 1.0 + p.rip_ks.delta_ub;
    let tail_term = sqrt_s * vr / gap * 2.0 * tail / sqrt_s;
    let noise_num = 2.0 * (2.0 * sqrt_k + 1.0) * (one_ub + cond.a_val * rho) * (m as f64) * s;
    let noise_den = sqrt_k * gap * one_ub * rho * rho;
    Ok(tail_term + noise_num / noise_den * eta2)
}

/// Threshold on a symmetric constant `delta_17s` for `alpha = 1`, `k = 16`:
/// `(192 s - 305 sqrt(s) - 137) / (320 s + 113 sqrt(s) + 153)`.
pub fn remark5_delta_threshold(s: f64) -> f64 {
    let t = s.sqrt();
    (192.0 * s - 305.0 * t - 137.0) / (320.0 * s + 113.0 * t + 153.0)
}

/// Everything the theory evaluators say about one parameter set.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TheoryReport {
    pub s: usize,
    pub k: f64,
    pub alpha: f64,
    pub m: usize,
    pub eta1: f64,
    pub eta2: f64,
    pub tail_norm: f64,
    pub rip_ks: RipPair,
    pub rip_k1s: RipPair,
    pub a_val: f64,
    pub b_val: f64,
    pub rho_ks: f64,
    pub varrho: f64,
    pub thm1_holds: bool,
    pub remark2_applicable: bool,
    pub remark2_holds: bool,
    pub thm2_holds: bool,
    pub thm2_error_bound: Option<f64>,
    pub thm2_failure: Option<String>,
    pub thm3_conditions: Thm3Conditions,
    pub thm3_holds: bool,
    pub thm3_error_bound: Option<f64>,
    pub thm3_failure: Option<String>,
    /// Symmetric-constant threshold, only for `alpha = 1`, `k = 16`.
    pub remark5_threshold: Option<f64>,
}

pub fn theory_report(
    p: &RecoveryParams,
    eta1: f64,
    eta2: f64,
    m: usize,
    tail: f64,
) -> Result<TheoryReport, TheoryError> {
    let t1 = check_thm1_condition(p)?;
    let t3 = thm3_conditions(p)?;
    let (thm2_error_bound, thm2_failure) = split(thm2_error_bound(p, eta1, tail));
    let (thm3_error_bound, thm3_failure) = split(thm3_error_bound(p, eta2, m, tail));
    let remark5_threshold =
        (p.alpha == 1.0 && p.k == 16.0).then(|| remark5_delta_threshold(p.s as f64));
    Ok(TheoryReport {
        s: p.s,
        k: p.k,
        alpha: p.alpha,
        m,
        eta1,
        eta2,
        tail_norm: tail,
        rip_ks: p.rip_ks,
        rip_k1s: p.rip_k1s,
        a_val: t1.a_val,
        b_val: t3.b_val,
        rho_ks: p.rho(),
        varrho: varrho(p),
        thm1_holds: t1.holds,
        remark2_applicable: t1.simplified_applicable,
        remark2_holds: t1.simplified_holds,
        thm2_holds: thm2_error_bound.is_some(),
        thm2_error_bound,
        thm2_failure,
        thm3_conditions: t3,
        thm3_holds: thm3_error_bound.is_some(),
        thm3_error_bound,
        thm3_failure,
        remark5_threshold,
    })
}

fn split(r: Result<f64, TheoryError>) -> (Option<f64>, Option<String>) {
    match r {
        Ok(v) if v.is_finite() => (Some(v), None),
        Ok(v) => (None, Some(format!("bound is not finite ({v})"))),
        Err(e) => (None, Some(e.to_string())),
    }
}

/// Inner estimate of the order-`s` (l2, l1) constants of a tiny matrix.
///
/// Every support of size `s` is visited. On each, `||A x||_1 / ||x||_2` is
/// evaluated at the signed basis directions, at all sign patterns
/// `(+-1, ..., +-1)` and at `samples_per_support` random Gaussian directions.
/// Orders below `s` are folded in as well, so the result is monotone in `s`.
/// Because only finitely many directions are tried, the reported constants
/// never exceed the true ones.
///
/// Random directions for a support are seeded from `seed` and the bit
/// patterns of its columns (visited in a canonical order), which makes the
/// estimate independent of how the columns of `A` are permuted.
pub fn brute_force_rip_l1(
    a: &SenseMatrix,
    s: usize,
    samples_per_support: usize,
    seed: u64,
) -> Result<RipPair, TheoryError> {
    let n = a.cols();
    if n > RIP_MAX_COLS || s > RIP_MAX_ORDER {
        return Err(TheoryError::TooLarge { n, s });
    }
    if s == 0 || s > n {
        return Err(TheoryError::InvalidArgument(format!("order {s} must lie in [1, {n}]")));
    }
    let columns: Vec<Vec<f64>> = (0..n).map(|j| a.column(j)).collect();
    let mut min_ratio = f64::INFINITY;
    let mut max_ratio = 0.0_f64;
    for order in 1..=s {
        for subset in combinations(n, order) {
            let mut cols: Vec<&Vec<f64>> = subset.iter().map(|&j| &columns[j]).collect();
            cols.sort_by(|x, y| cmp_bits(x, y));
            let (lo, hi) = support_extremes(&cols, samples_per_support, seed);
            min_ratio = min_ratio.min(lo);
            max_ratio = max_ratio.max(hi);
        }
    }
    Ok(RipPair {
        s,
        delta_lb: (1.0 - min_ratio).max(0.0),
        delta_ub: (max_ratio - 1.0).max(0.0),
    })
}

fn cmp_bits(x: &[f64], y: &[f64]) -> std::cmp::Ordering {
    let xb = x.iter().map(|v| v.to_bits());
    let yb = y.iter().map(|v| v.to_bits());
    xb.cmp(yb)
}

fn support_extremes(cols: &[&Vec<f64>], samples: usize, seed: u64) -> (f64, f64) {
    let k = cols.len();
    let m = cols[0].len();
    let mut lo = f64::INFINITY;
    let mut hi = 0.0_f64;
    let mut buf = vec![0.0; m];
    let mut eval = |coef: &[f64]| {
        let nrm = norm2(coef);
        if nrm == 0.0 {
            return;
        }
        buf.fill(0.0);
        for (c, col) in coef.iter().zip(cols) {
            for (b, v) in buf.iter_mut().zip(col.iter()) {
                *b += c * v;
            }
        }
        let r = norm1(&buf) / nrm;
        lo = lo.min(r);
        hi = hi.max(r);
    };

    let mut coef = vec![0.0; k];
    for i in 0..k {
        coef.fill(0.0);
        coef[i] = 1.0;
        eval(&coef);
    }
    // sign patterns; the global sign is irrelevant so the first entry stays +1
    for mask in 0..(1u32 << (k - 1)) {
        coef[0] = 1.0;
        for (i, c) in coef.iter_mut().enumerate().skip(1) {
            *c = if mask & (1 << (i - 1)) != 0 { -1.0 } else { 1.0 };
        }
        eval(&coef);
    }

    let mut h = fnv1a(FNV_OFFSET, seed);
    for col in cols {
        for v in col.iter() {
            h = fnv1a(h, v.to_bits());
        }
    }
    let mut rng = ChaCha8Rng::seed_from_u64(h);
    for _ in 0..samples {
        for c in coef.iter_mut() {
            *c = rng.sample(StandardNormal);
        }
        eval(&coef);
    }
    (lo, hi)
}

const FNV_OFFSET: u64 = 0xcbf2_9ce4_8422_2325;

fn fnv1a(mut h: u64, word: u64) -> u64 {
    for byte in word.to_le_bytes() {
        h ^= byte as u64;
        h = h.wrapping_mul(0x0000_0100_0000_01b3);
    }
    h
}

/// All `k`-subsets of `0..n` in lexicographic order.
fn combinations(n: usize, k: usize) -> Vec<Vec<usize>> {
    let mut out = Vec::new();
    let mut cur: Vec<usize> = (0..k).collect();
    if k > n {
        return out;
    }
    loop {
        out.push(cur.clone());
        let mut i = k;
        while i > 0 && cur[i - 1] == n - k + i - 1 {
            i -= 1;
        }
        if i == 0 {
            return out;
        }
        cur[i - 1] += 1;
        for j in i..k {
            cur[j] = cur[j - 1] + 1;
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn params(s: usize, k: f64, alpha: f64, lb: f64, ub: f64) -> RecoveryParams {
        let ks = (k * s as f64).round() as usize;
        RecoveryParams {
            s,
            k,
            alpha,
            rip_ks: RipPair::new(ks, lb, ub),
            rip_k1s: RipPair::new(ks + s, lb, ub),
        }
    }

    #[test]
    fn l1_minus_l2_examples() {
        assert_eq!(l1_minus_alpha_l2(&[0.0, -3.0, 0.0], 1.0), 0.0);
        assert!((l1_minus_alpha_l2(&[1.0, 1.0], 1.0) - (2.0 - 2f64.sqrt())).abs() < 1e-15);
        assert_eq!(l1_minus_alpha_l2(&[0.0; 4], 0.5), 0.0);
    }

    #[test]
    fn lemma2_tight_example() {
        let x = SparseSignal::new(4, vec![0, 1, 2, 3], vec![1.0; 4]).unwrap();
        assert_eq!(check_lemma2_bounds(&x, 1.0), (true, true));
        let one = SparseSignal::new(5, vec![3], vec![-2.5]).unwrap();
        assert_eq!(check_lemma2_bounds(&one, 1.0), (true, true));
    }

    #[test]
    fn cone_identity_pair_and_precondition() {
        let x = [1.0, -2.0, 0.0, 0.5];
        assert!(check_cone_constraint(&x, &x, 2, 0.7).unwrap().all());
        let bigger = [5.0, -2.0, 3.0, 0.5];
        assert!(matches!(
            check_cone_constraint(&x, &bigger, 2, 0.7),
            Err(TheoryError::PreconditionViolated(_))
        ));
    }

    #[test]
    fn a_const_examples() {
        let closed = (4.0 * 7f64.sqrt() - 1.0) / (7f64.sqrt() + 1.0);
        assert!((a_const(7.0, 112.0, 1.0) - closed).abs() < 1e-14);
        assert!((closed - 2.6285).abs() < 1e-4);
        assert_eq!(a_const(1.0, 1.0, 0.0), 1.0);
        assert!((a_const(4.0, 4.0, 1.0) - 1.0 / 3.0).abs() < 1e-15);
    }

    #[test]
    fn rho_examples() {
        assert_eq!(rho_const(0.0, 0.0, 2.0), 0.5);
        assert!((rho_const(0.1, 0.1, 2.0) - 0.35).abs() < 1e-15);
        assert!((rho_const(0.0, 0.0, 1e6) - 1.0).abs() < 1e-5);
    }

    #[test]
    fn thm1_examples() {
        let p = params(7, 16.0, 1.0, 0.0, 0.0);
        assert!(check_thm1_condition(&p).unwrap().holds);

        // delta_ub = a - 1 sits on the boundary of a strict inequality
        let mut q = params(7, 16.0, 1.0, 0.0, 0.0);
        q.rip_ks.delta_ub = q.a() - 1.0;
        assert!(!check_thm1_condition(&q).unwrap().holds);

        let r = params(7, 16.0, 1.0, 0.1, 0.1);
        let v = check_thm1_condition(&r).unwrap();
        assert!(v.holds);
        assert!(v.simplified_applicable);
    }

    #[test]
    fn thm2_examples() {
        let p = params(7, 16.0, 1.0, 0.05, 0.05);
        assert_eq!(thm2_error_bound(&p, 0.0, 0.0).unwrap(), 0.0);
        let v = thm2_error_bound(&p, 1e-3, 0.0).unwrap();
        assert!(v > 0.0 && v.is_finite());

        let edge = params(1, 1.0, 0.0, 0.0, 0.0);
        assert!(matches!(
            thm2_error_bound(&edge, 1.0, 0.0),
            Err(TheoryError::ConditionFails(_))
        ));
    }

    #[test]
    fn thm3_remark_example_and_zero_bound() {
        let p = params(7, 16.0, 1.0, 0.0, 0.0);
        let c = thm3_conditions(&p).unwrap();
        assert!(c.a_gt_2 && c.b_gt_1 && c.ab_lt_a_plus_b);
        assert_eq!(thm3_error_bound(&p, 0.0, 32, 0.0).unwrap(), 0.0);
        let bad = params(7, 16.0, 1.0, 0.99, 0.99);
        assert!(matches!(
            thm3_error_bound(&bad, 0.0, 32, 0.0),
            Err(TheoryError::ConditionFails(_))
        ));
    }

    #[test]
    fn rejects_fractional_ks() {
        let p = params(3, 0.5, 1.0, 0.0, 0.0);
        assert!(matches!(check_thm1_condition(&p), Err(TheoryError::InvalidArgument(_))));
    }

    #[test]
    fn combinations_count() {
        assert_eq!(combinations(5, 2).len(), 10);
        assert_eq!(combinations(14, 4).len(), 1001);
        assert_eq!(combinations(3, 3), vec![vec![0, 1, 2]]);
    }

    #[test]
    fn rip_guard() {
        let a = SenseMatrix::gaussian(4, 15, 0).unwrap();
        assert!(matches!(brute_force_rip_l1(&a, 2, 10, 0), Err(TheoryError::TooLarge { .. })));
        let b = SenseMatrix::gaussian(4, 8, 0).unwrap();
        assert!(matches!(brute_force_rip_l1(&b, 5, 10, 0), Err(TheoryError::TooLarge { .. })));
    }
}
