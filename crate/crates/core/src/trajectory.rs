//! Deterministic trajectories of the q-linear process and the arithmetic
//! built on them.
//!
//! With `p(t) = 1 - q(q-1)t` the predicted codegree of a live j-set is
//! `y_j = C(n-j, q-j) p^(C(q,2) - C(j,2))`, `h = y_0`, and the allowed
//! deviation is
//! `eps_j = C(n-j, q-j) n^(-1 + 3 beta C(q,2)) q^f p^(-C(j,2) - 2 C(q,2))`
//! with `f = (ln ln n)^2` and `beta = 1/(6 q^2)`. All logarithms are natural.
//! Everything is carried as natural logs so that large `n` and small `p`
//! neither overflow nor cancel.

use num_bigint::BigUint;
use serde::Serialize;

use crate::binom::{choose2, ln_binomial};
use crate::error::{Error, Result};

/// A real number stored as sign and log-magnitude.
#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct SignedLog {
    pub negative: bool,
    pub ln_abs: f64,
}

impl SignedLog {
    pub fn value(&self) -> f64 {
        let m = self.ln_abs.exp();
        if self.negative {
            -m
        } else {
            m
        }
    }
}

#[derive(Clone, Debug, Serialize)]
pub struct TrajectoryParams {
    n: u64,
    q: u64,
    /// `(ln ln n)^2`.
    pub f: f64,
    /// `1 / (6 q^2)`.
    pub beta: f64,
    /// Last step the trajectory statements cover.
    pub m0: u64,
    ln_n: f64,
    ln_q: f64,
    /// `ln(n^(-1 + 3 beta C(q,2)) q^f)`, the part of `eps_j` shared by every `j`.
    ln_eps_scale: f64,
}

#[derive(Clone, Debug, Serialize)]
pub struct CurvePoint {
    pub t: f64,
    pub p: f64,
    pub ln_p: f64,
    /// `ln y_j` for `j = 0..q`; `ln_y[0]` is `ln h`.
    pub ln_y: Vec<f64>,
    /// `ln eps_j`; `ln_eps[0]` is `ln eps_H`.
    pub ln_eps: Vec<f64>,
    /// `y_j'(t)`.
    pub dy: Vec<SignedLog>,
    /// `eps_j'(t)`.
    pub deps: Vec<SignedLog>,
}

impl CurvePoint {
    pub fn ln_h(&self) -> f64 {
        self.ln_y[0]
    }

    pub fn ln_eps_h(&self) -> f64 {
        self.ln_eps[0]
    }

    pub fn h(&self) -> f64 {
        self.ln_y[0].exp()
    }

    pub fn eps_h(&self) -> f64 {
        self.ln_eps[0].exp()
    }

    pub fn y(&self, j: usize) -> f64 {
        self.ln_y[j].exp()
    }

    pub fn eps(&self, j: usize) -> f64 {
        self.ln_eps[j].exp()
    }
}

/// `p(t) = 1 - q(q-1)t`, defined for every `t`.
pub fn pair_survival(q: u64, t: f64) -> f64 {
    1.0 - (q * (q - 1)) as f64 * t
}

/// `t_i = i / (n(n-1))`.
pub fn step_time(n: u64, i: u64) -> f64 {
    i as f64 / (n * (n - 1)) as f64
}

/// `p(t_i)` and `ln p(t_i)` from the exact fraction `(n(n-1) - i q(q-1)) / (n(n-1))`.
pub fn survival_at_step(n: u64, q: u64, i: u64) -> (f64, f64) {
    let total = u128::from(n) * u128::from(n - 1);
    let used = u128::from(i) * u128::from(q * (q - 1));
    if used >= total {
        return (0.0, f64::NEG_INFINITY);
    }
    let p = (total - used) as f64 / total as f64;
    let ln_p = (-(used as f64 / total as f64)).ln_1p();
    (p, ln_p)
}

/// `h(t_i) = C(n, q) p^(C(q,2))` at a step, for any `n` and `q >= 2`.
pub fn ln_h_at_step(n: u64, q: u64, i: u64) -> f64 {
    let (_, ln_p) = survival_at_step(n, q, i);
    if ln_p == f64::NEG_INFINITY {
        return f64::NEG_INFINITY;
    }
    ln_binomial(n, q) + choose2(q) as f64 * ln_p
}

/// Whether `m` satisfies `q(q-1) m <= n(n-1)(1 - n^(-beta))`, decided exactly.
///
/// Equivalent to `n * (n(n-1) - m q(q-1))^(6q^2) >= (n(n-1))^(6q^2)`.
fn within_m0(n: u64, q: u64, m: u64) -> bool {
    let total = u128::from(n) * u128::from(n - 1);
    let used = u128::from(m) * u128::from(q * (q - 1));
    if used > total {
        return false;
    }
    let power = (6 * q * q) as u32;
    let lhs = BigUint::from(n) * BigUint::from(total - used).pow(power);
    let rhs = BigUint::from(total).pow(power);
    lhs >= rhs
}

impl TrajectoryParams {
    pub fn new(n: u64, q: u64) -> Result<Self> {
        if q < 3 || q > n {
            return Err(Error::Domain(format!(
                "trajectory needs 3 <= q <= n, got n = {n}, q = {q}"
            )));
        }
        if n < 16 {
            return Err(Error::Domain(format!(
                "ln ln n must be positive, got n = {n}"
            )));
        }
        let ln_n = (n as f64).ln();
        let ln_q = (q as f64).ln();
        let f = ln_n.ln().powi(2);
        let beta = 1.0 / (6 * q * q) as f64;
        let ln_eps_scale = (-1.0 + 3.0 * beta * choose2(q) as f64) * ln_n + f * ln_q;

        // float estimate, then settle the floor with the exact predicate
        let edges_max = (n * (n - 1)) as f64 / (q * (q - 1)) as f64;
        let mut m0 = (edges_max * -(-beta * ln_n).exp_m1()).floor().max(0.0) as u64;
        while m0 > 0 && !within_m0(n, q, m0) {
            m0 -= 1;
        }
        while within_m0(n, q, m0 + 1) {
            m0 += 1;
        }
        Ok(Self {
            n,
            q,
            f,
            beta,
            m0,
            ln_n,
            ln_q,
            ln_eps_scale,
        })
    }

    pub fn n(&self) -> u64 {
        self.n
    }

    pub fn q(&self) -> u64 {
        self.q
    }

    /// `t_{m0}`, the right end of the curve domain.
    pub fn t_max(&self) -> f64 {
        step_time(self.n, self.m0)
    }

    /// `n^(-beta)`.
    pub fn p_floor(&self) -> f64 {
        (-self.beta * self.ln_n).exp()
    }

    /// Curves at continuous time `t` in `[0, t_{m0}]`.
    pub fn eval_curves(&self, t: f64) -> Result<CurvePoint> {
        if !(0.0..=self.t_max()).contains(&t) {
            return Err(Error::Domain(format!(
                "t = {t} outside [0, {}]",
                self.t_max()
            )));
        }
        let x = (self.q * (self.q - 1)) as f64 * t;
        Ok(self.point(t, 1.0 - x, (-x).ln_1p()))
    }

    /// Curves at step `i <= m0`, using the exact value of `p(t_i)`.
    pub fn eval_at_step(&self, i: u64) -> Result<CurvePoint> {
        if i > self.m0 {
            return Err(Error::Domain(format!("step {i} beyond m0 = {}", self.m0)));
        }
        Ok(self.eval_at_step_unbounded(i))
    }

    /// Like [`eval_at_step`](Self::eval_at_step) but past `m0` too, for as
    /// long as `p > 0`. No trajectory statement covers those steps.
    pub fn eval_at_step_unbounded(&self, i: u64) -> CurvePoint {
        let (p, ln_p) = survival_at_step(self.n, self.q, i);
        self.point(step_time(self.n, i), p, ln_p)
    }

    fn point(&self, t: f64, p: f64, ln_p: f64) -> CurvePoint {
        let (n, q) = (self.n, self.q);
        let cq2 = choose2(q) as f64;
        let ln_rate = ((q * (q - 1)) as f64).ln();
        let qn = q as usize;
        let mut point = CurvePoint {
            t,
            p,
            ln_p,
            ln_y: Vec::with_capacity(qn),
            ln_eps: Vec::with_capacity(qn),
            dy: Vec::with_capacity(qn),
            deps: Vec::with_capacity(qn),
        };
        for j in 0..q {
            let ln_c = ln_binomial(n - j, q - j);
            let cj2 = choose2(j) as f64;
            let y_exp = cq2 - cj2;
            let eps_exp = -cj2 - 2.0 * cq2;
            point.ln_y.push(ln_c + y_exp * ln_p);
            point.ln_eps.push(ln_c + self.ln_eps_scale + eps_exp * ln_p);
            // d/dt p^k = k p^(k-1) * (-q(q-1))
            point.dy.push(SignedLog {
                negative: true,
                ln_abs: ln_c + y_exp.ln() + (y_exp - 1.0) * ln_p + ln_rate,
            });
            point.deps.push(SignedLog {
                negative: false,
                ln_abs: ln_c
                    + self.ln_eps_scale
                    + (-eps_exp).ln()
                    + (eps_exp - 1.0) * ln_p
                    + ln_rate,
            });
        }
        point
    }

    /// `ln` of `q^f n^(-1 + 3 beta C(q,2)) p^(-3 C(q,2))`, which `eps_j / y_j` equals for every `j`.
    pub fn ln_relative_envelope(&self, ln_p: f64) -> f64 {
        self.ln_eps_scale - 3.0 * choose2(self.q) as f64 * ln_p
    }

    fn ln_scaled_step(&self) -> f64 {
        // ln(n(n-1))
        self.ln_n + ((self.n - 1) as f64).ln()
    }

    pub fn lemma6_report(&self, t: f64, j: u64) -> Result<Lemma6Report> {
        if j >= self.q {
            return Err(Error::Input(format!(
                "j = {j} must be below q = {}",
                self.q
            )));
        }
        let pt = self.eval_curves(t)?;
        let (n, q) = (self.n, self.q);
        let ju = j as usize;
        let cq2 = choose2(q);
        let cj2 = choose2(j);
        let ln_nn = self.ln_scaled_step();
        let ln_h = pt.ln_h();
        // eps_j' / (n(n-1)), the yardstick of every comparison
        let ln_deps_step = pt.deps[ju].ln_abs - ln_nn;

        let ln_lhs = ((cq2 - cj2) as f64).ln() + pt.ln_y[ju] + pt.ln_y[2] - ln_h;
        let ln_rhs = pt.dy[ju].ln_abs - ln_nn;
        let linear_residual = (ln_lhs - ln_rhs).exp_m1().abs();

        let ln_quad = (cq2 as f64).ln() + pt.ln_y[ju] + pt.ln_eps[2] - ln_h;
        let quadratic_ratio = (ln_quad - ln_deps_step).exp();

        let higher_order = (3..q)
            .map(|m| {
                let mu = m as usize;
                let ln_pref = (q as f64).ln() + ln_binomial(q, m) + pt.ln_y[ju] - ln_h;
                HigherOrderRatios {
                    m,
                    y_ratio: (ln_pref + pt.ln_y[mu] - ln_deps_step).exp(),
                    eps_ratio: (ln_pref + pt.ln_eps[mu] - ln_deps_step).exp(),
                }
            })
            .collect();

        // y_j'' = C a (a-1) (q(q-1))^2 p^(a-2) with a >= 2, largest at p = 1.
        // eps_j'' = C K b (b+1) (q(q-1))^2 p^(-b-2), largest at the smallest p.
        let ln_c = ln_binomial(n - j, q - j);
        let ln_rate = ((q * (q - 1)) as f64).ln();
        let a = (cq2 - cj2) as f64;
        let b = (cj2 + 2 * cq2) as f64;
        let ln_sup_dyy = ln_c + (a * (a - 1.0)).ln() + 2.0 * ln_rate;
        let (_, ln_p_min) = survival_at_step(n, q, self.m0);
        let ln_sup_deps2 =
            ln_c + self.ln_eps_scale + (b * (b + 1.0)).ln() + 2.0 * ln_rate - (b + 2.0) * ln_p_min;
        let ln_taylor = std::f64::consts::LN_2 + 2.0 * ln_nn;

        Ok(Lemma6Report {
            t,
            j,
            linear_residual,
            derivative_negative: pt.dy[ju].negative,
            quadratic_ratio,
            quadratic_ratio_exact: (cq2, cj2 + 2 * cq2),
            higher_order,
            y_second_derivative_ratio: (ln_sup_dyy - ln_taylor - ln_deps_step).exp(),
            eps_second_derivative_ratio: (ln_sup_deps2 - ln_taylor - ln_deps_step).exp(),
        })
    }

    pub fn freedman_budget(&self, j: u64) -> Result<FreedmanBudget> {
        if j >= self.q {
            return Err(Error::Input(format!(
                "j = {j} must be below q = {}",
                self.q
            )));
        }
        let (n, q) = (self.n, self.q);
        let cq2 = choose2(q) as f64;
        let ln_top = ln_binomial(n - j, q - j);
        let ln_c = ((q - 1) as f64).ln() + ln_binomial(n - j, q - j - 1);
        let ln_v = ln_top + (self.f + 2.0) * self.ln_q + (-1.0 + 6.0 * self.beta * cq2) * self.ln_n;
        let ln_z = ln_top + (-1.0 + 3.0 * self.beta * cq2) * self.ln_n + self.f * self.ln_q;
        let ln_v_plus_z = ln_v + (ln_z - ln_v).exp().ln_1p();
        let ln_exponent = 2.0 * ln_z - std::f64::consts::LN_2 - ln_c - ln_v_plus_z;
        let ln_z2_over_cv = 2.0 * ln_z - ln_c - ln_v;
        Ok(FreedmanBudget {
            j,
            ln_c,
            ln_v,
            ln_z,
            ln_exponent,
            ln_z2_over_cv,
            ln_z2_over_cv_per_q_f_minus_4: ln_z2_over_cv - (self.f - 4.0) * self.ln_q,
        })
    }
}

#[derive(Clone, Debug, Serialize)]
pub struct HigherOrderRatios {
    pub m: u64,
    /// `q C(q,m) y_j y_m / h` over `eps_j' / (n(n-1))`.
    pub y_ratio: f64,
    /// Same with `eps_m` in place of `y_m`.
    pub eps_ratio: f64,
}

/// The five comparisons that make `Y_J^+` a supermartingale, evaluated at one `(t, j)`.
#[derive(Clone, Debug, Serialize)]
pub struct Lemma6Report {
    pub t: f64,
    pub j: u64,
    /// Relative gap between `(C(q,2) - C(j,2)) y_j y_2 / h` and `|y_j'| / (n(n-1))`.
    /// The identity only holds with the absolute value: `y_j'` is negative,
    /// which `derivative_negative` records.
    pub linear_residual: f64,
    pub derivative_negative: bool,
    /// `C(q,2) y_j eps_2 / h` over `eps_j' / (n(n-1))`.
    pub quadratic_ratio: f64,
    /// The same ratio in closed form, `C(q,2) / (C(j,2) + 2 C(q,2))`, as numerator and denominator.
    pub quadratic_ratio_exact: (u64, u64),
    /// One entry per `3 <= m <= q-1`.
    pub higher_order: Vec<HigherOrderRatios>,
    /// `sup |y_j''| / (2 n^2 (n-1)^2)` over `eps_j' / (n(n-1))`.
    pub y_second_derivative_ratio: f64,
    /// `sup |eps_j''| / (2 n^2 (n-1)^2)` over `eps_j' / (n(n-1))`.
    pub eps_second_derivative_ratio: f64,
}

impl Lemma6Report {
    /// `C(q,2) / (C(j,2) + 2 C(q,2)) <= 1/2`, decided in integers.
    pub fn quadratic_bound_holds(&self) -> bool {
        let (num, den) = self.quadratic_ratio_exact;
        2 * num <= den
    }
}

/// Inputs to the Freedman tail bound for `Y_J^+`, in natural logs.
#[derive(Clone, Debug, Serialize)]
pub struct FreedmanBudget {
    pub j: u64,
    /// `C = (q-1) C(n-j, q-j-1)`, the one-step bound.
    pub ln_c: f64,
    /// `V = C(n-j, q-j) q^(f+2) n^(-1 + 6 beta C(q,2))`, with the O-constant dropped.
    pub ln_v: f64,
    /// `z = eps_j(0)`.
    pub ln_z: f64,
    /// `z^2 / (2 C (V + z))`.
    pub ln_exponent: f64,
    /// `z^2 / (C V)`.
    pub ln_z2_over_cv: f64,
    /// `z^2 / (C V)` divided by `q^(f-4)`.
    pub ln_z2_over_cv_per_q_f_minus_4: f64,
}

impl FreedmanBudget {
    pub fn c(&self) -> f64 {
        self.ln_c.exp()
    }

    pub fn z_below_v(&self) -> bool {
        self.ln_z <= self.ln_v
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn rel(a: f64, b: f64) -> f64 {
        ((a - b) / b).abs()
    }

    #[test]
    fn params_n100_q3() {
        let p = TrajectoryParams::new(100, 3).unwrap();
        assert_eq!(p.beta * 54.0, 1.0);
        assert_eq!(p.m0, 134);
    }

    #[test]
    fn f_at_n16() {
        let p = TrajectoryParams::new(16, 3).unwrap();
        let direct = (16f64.ln().ln()).powi(2);
        assert!(rel(p.f, direct) < 1e-15);
        assert!((p.f - 1.03995).abs() < 1e-5, "{}", p.f);
    }

    #[test]
    fn beta_times_6q2_is_one() {
        for q in 3..12u64 {
            let p = TrajectoryParams::new(1000, q).unwrap();
            assert_eq!(p.beta * (6 * q * q) as f64, 1.0);
        }
    }

    #[test]
    fn domain_errors() {
        assert!(matches!(
            TrajectoryParams::new(15, 3),
            Err(Error::Domain(_))
        ));
        assert!(matches!(
            TrajectoryParams::new(100, 2),
            Err(Error::Domain(_))
        ));
        let p = TrajectoryParams::new(100, 3).unwrap();
        assert!(matches!(p.eval_curves(-1e-9), Err(Error::Domain(_))));
        assert!(matches!(p.eval_curves(1.0 / 6.0), Err(Error::Domain(_))));
        assert!(matches!(p.eval_at_step(135), Err(Error::Domain(_))));
        assert!(p.lemma6_report(0.0, 3).is_err());
    }

    #[test]
    fn boundary_probe_has_zero_survival() {
        assert_eq!(pair_survival(3, 1.0 / 6.0), 0.0);
        assert_eq!(pair_survival(4, 1.0 / 12.0), 0.0);
    }

    #[test]
    fn curves_at_zero() {
        let p = TrajectoryParams::new(50, 4).unwrap();
        let c = p.eval_curves(0.0).unwrap();
        assert_eq!(c.p, 1.0);
        assert!(rel(c.h(), 230_300.0) < 1e-12);
        for j in 0..4u64 {
            let exact = crate::binom::binomial(50 - j, 4 - j).unwrap() as f64;
            assert!(rel(c.y(j as usize), exact) < 1e-12);
        }
        assert_eq!(c.ln_h(), c.ln_y[0]);
        assert_eq!(c.ln_eps_h(), c.ln_eps[0]);
    }

    #[test]
    fn exact_step_matches_continuous_time() {
        let p = TrajectoryParams::new(200, 3).unwrap();
        for i in [0, 1, 17, p.m0] {
            let a = p.eval_at_step(i).unwrap();
            let b = p.eval_curves(step_time(200, i)).unwrap();
            assert!(rel(a.h(), b.h()) < 1e-12);
        }
    }

    #[test]
    fn freedman_small_cases() {
        let p = TrajectoryParams::new(1000, 4).unwrap();
        let b = p.freedman_budget(3).unwrap();
        assert!(rel(b.c(), 3.0) < 1e-14);
        let b0 = p.freedman_budget(0).unwrap();
        assert!(rel(b0.ln_z, p.eval_curves(0.0).unwrap().ln_eps_h()) < 1e-14);
        assert!(b0.z_below_v());
    }
}
