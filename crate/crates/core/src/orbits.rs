//! Constructive orbit algorithms on reduced tuples over the complex numbers.
//!
//! [`normalize_d3`] drives any point of the Calogero-Moser tuple variety
//! (`v = -3`) to the zero tuple; [`classify_d30`] sends any point of the
//! commuting tuple variety (`v = 0`) to one of three representatives.
//!
//! Every step asserts the postcondition it is taken for (which coordinates
//! must have become zero or nonzero) and snaps asserted zeros to exact
//! zeros. Zero tests use the tolerance guard band: values inside the band
//! are refused with [`Error::Ambiguous`] rather than guessed.

use serde::{Deserialize, Serialize};

use crate::cremona::{act_tuple, act_tuple_word, recentered, GroupWord, Move};
use crate::error::{Error, Result};
use crate::exec::Execution;
use crate::invariants::ReducedTuple;
use crate::relations::{eval_id1z, eval_id2z, ResidualVector};
use crate::scalar::{cbrt_branch, sqrt_branch, Complex, TolerancePolicy, ZeroTest};

pub const NORMALIZE_WORD_BOUND: usize = 16;
pub const CLASSIFY_WORD_BOUND: usize = 20;

#[derive(Clone, Debug, PartialEq)]
pub struct NormalizationResult {
    pub word: GroupWord<Complex>,
    /// The tuple reached, with asserted zeros snapped.
    pub terminal: ReducedTuple<Complex>,
    /// Max-norm distance between the replay of `word` on the input and
    /// `terminal`.
    pub residual: f64,
    pub branch_log: Vec<String>,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "SCREAMING_SNAKE_CASE")]
pub enum OrbitLabel {
    Zero,
    Special,
    Generic,
}

fn c(re: f64) -> Complex {
    Complex::new(re, 0.0)
}

impl OrbitLabel {
    /// `(0,..,0)`, `(0,0,6^(1/3),0,0,0,1)` and `(0,..,0,1)`.
    pub fn representative(self) -> ReducedTuple<Complex> {
        let mut t = ReducedTuple::zero();
        match self {
            OrbitLabel::Zero => {}
            OrbitLabel::Special => {
                t.set(5, c(6f64.cbrt()));
                t.set(9, c(1.0));
            }
            OrbitLabel::Generic => t.set(9, c(1.0)),
        }
        t
    }
}

const CM_V: f64 = -3.0;
const COMMUTING_V: f64 = 0.0;

/// Parameters tried, in order, where a step only needs a generic choice.
const GENERIC_PARAMETERS: [(f64, f64); 8] = [
    (1.0, 0.0),
    (2.0, 0.0),
    (-1.0, 0.0),
    (0.5, 0.0),
    (3.0, 0.0),
    (-2.5, 0.0),
    (1.0, 1.0),
    (0.7, -1.3),
];

struct Walk {
    input: ReducedTuple<Complex>,
    t: ReducedTuple<Complex>,
    v: Complex,
    tol: TolerancePolicy,
    word: Vec<Move<Complex>>,
    log: Vec<String>,
    /// Largest tuple magnitude the walk has passed through; branch
    /// decisions are relative to it.
    max_seen: f64,
    /// `max_seen` grown by the cubic amplification of every `Theta` since;
    /// asserted postconditions are relative to it.
    err_scale: f64,
}

impl Walk {
    fn new(input: &ReducedTuple<Complex>, v: f64, tol: TolerancePolicy) -> Self {
        Walk {
            input: input.clone(),
            t: input.clone(),
            v: c(v),
            tol,
            word: Vec::new(),
            log: Vec::new(),
            max_seen: input.max_magnitude(),
            err_scale: input.max_magnitude(),
        }
    }

    fn a(&self, k: usize) -> Complex {
        *self.t.a(k)
    }

    fn classify(&self, z: Complex, scale: f64, context: &str) -> Result<bool> {
        match self.tol.classify(z.norm(), scale) {
            ZeroTest::Zero => Ok(true),
            ZeroTest::NonZero => Ok(false),
            ZeroTest::Ambiguous => Err(Error::Ambiguous {
                context: context.to_string(),
                magnitude: z.norm(),
                lower: self.tol.bound(scale),
                upper: 10.0 * self.tol.bound(scale),
            }),
        }
    }

    /// Zero test for coordinate `a_k`, relative to the largest magnitude the
    /// walk has passed through (rounding error is carried from there). A
    /// coordinate found zero is snapped, since every later step relies on it.
    fn is_zero(&mut self, k: usize) -> Result<bool> {
        let zero = self.classify(self.a(k), self.max_seen, &format!("a{k} = 0?"))?;
        if zero {
            self.t.set(k, c(0.0));
        }
        Ok(zero)
    }

    fn all_zero(&mut self) -> Result<bool> {
        for k in 3..=9 {
            if !self.is_zero(k)? {
                return Ok(false);
            }
        }
        Ok(true)
    }

    fn fail(&self, step: &str) -> Error {
        Error::CaseDispatch {
            step: step.to_string(),
            log: self.log.clone(),
        }
    }

    /// Whether `a_k` may be skipped by a step that would only clear it. A
    /// coordinate in the guard band is cleared rather than refused, since
    /// clearing is correct either way.
    fn negligible(&mut self, k: usize) -> bool {
        let zero = self.tol.classify(self.a(k).norm(), self.max_seen) == ZeroTest::Zero;
        if zero {
            self.t.set(k, c(0.0));
        }
        zero
    }

    /// Asserts `a_k = 0` for every listed `k` and snaps them.
    fn expect_zero(&mut self, ks: &[usize], step: &str) -> Result<()> {
        for &k in ks {
            if !self.classify(self.a(k), self.err_scale, &format!("{step}: a{k} = 0?"))? {
                return Err(self.fail(&format!("{step}: a{k} = {} should vanish", self.a(k))));
            }
        }
        for &k in ks {
            self.t.set(k, c(0.0));
        }
        Ok(())
    }

    fn apply(&mut self, mv: Move<Complex>, label: &str) -> Result<()> {
        let mv = recentered(mv, &self.t);
        self.t = act_tuple(&mv, &self.t, &self.v)?;
        if let Move::Theta(m) = &mv {
            let r = m
                .iter()
                .map(|row| row[0].norm() + row[1].norm())
                .fold(1.0, f64::max);
            self.err_scale *= r.powi(3);
        }
        self.max_seen = self.max_seen.max(self.t.max_magnitude());
        self.err_scale = self.err_scale.max(self.max_seen);
        self.word.push(mv);
        self.log.push(label.to_string());
        Ok(())
    }

    fn theta(&mut self, m: [[Complex; 2]; 2], label: &str) -> Result<()> {
        self.apply(Move::theta(m)?, label)
    }

    /// Isotropic directions `p` of the quadratic form `(a3, a4, a5)`,
    /// normalized to unit max-component, in groups tried in order. A
    /// discriminant within tolerance of zero is first taken as an exact
    /// double root; the unsnapped roots follow as a second group.
    fn isotropic_directions(&mut self) -> Result<Vec<Vec<[Complex; 2]>>> {
        let (z3, z4, z5) = (self.is_zero(3)?, self.is_zero(4)?, self.is_zero(5)?);
        let (a3, a4, a5) = (self.a(3), self.a(4), self.a(5));
        let one = c(1.0);
        let zero = c(0.0);
        let mut groups = Vec::new();
        if z3 {
            let mut out = vec![[one, zero]];
            if !z4 {
                out.push([-a5, a4 * 2.0]);
            } else if z5 {
                for p in [(0.0, 1.0), (1.0, 1.0), (1.0, -1.0), (1.0, 2.0), (2.0, 1.0)] {
                    out.push([c(p.0), c(p.1)]);
                }
            }
            groups.push(out);
        } else {
            let roots = |disc: Complex| {
                let mut sq = sqrt_branch(disc, 0);
                if (a4.conj() * sq).re < 0.0 {
                    sq = -sq;
                }
                let big = a4 + sq;
                let mut out = vec![[-big / a3, one]];
                if big.norm() > 0.0 {
                    out.push([-a5 / big, one]);
                }
                out
            };
            let disc = a4 * a4 - a3 * a5;
            if disc.norm() <= self.tol.bound(self.max_seen.powi(2)) {
                groups.push(roots(zero));
            }
            groups.push(roots(disc));
        }
        Ok(groups
            .into_iter()
            .map(|g| {
                g.into_iter()
                    .map(|p| {
                        let m = p[0].norm().max(p[1].norm());
                        [p[0] / m, p[1] / m]
                    })
                    .collect()
            })
            .collect())
    }

    /// Applies `Theta` with an isotropic first row, so that `a3` becomes
    /// zero. Among the completions `q0 + s p` to `SL2` it keeps the one with
    /// the largest `|a7|` relative to the resulting tuple, since the next
    /// step divides by `a7`. Returns whether `a7 != 0` was achieved.
    fn theta_isotropic(&mut self, label: &str) -> Result<bool> {
        let mut best: Option<(f64, [[Complex; 2]; 2])> = None;
        let mut fallback: Option<[[Complex; 2]; 2]> = None;
        for group in self.isotropic_directions()? {
            if best.is_some() || fallback.is_some() {
                break;
            }
            for p in group {
                let q0 = if p[0].norm() >= p[1].norm() {
                    [c(0.0), c(1.0) / p[0]]
                } else {
                    [-c(1.0) / p[1], c(0.0)]
                };
                for s in [0.0, 1.0, -1.0, 2.0, -2.0] {
                    let m = [p, [q0[0] + p[0] * s, q0[1] + p[1] * s]];
                    let trial = act_tuple(&Move::Theta(m), &self.t, &self.v)?;
                    let scale = self.max_seen.max(trial.max_magnitude());
                    let test = |k: usize| self.tol.classify(trial.a(k).norm(), scale);
                    if test(3) != ZeroTest::Zero {
                        break;
                    }
                    match test(7) {
                        ZeroTest::NonZero => {
                            let merit = trial.a(7).norm() / trial.max_magnitude();
                            if best.is_none_or(|(m0, _)| merit > m0) {
                                best = Some((merit, m));
                            }
                        }
                        ZeroTest::Zero if fallback.is_none() => fallback = Some(m),
                        _ => {}
                    }
                }
            }
        }
        let (m, reached) = match (best, fallback) {
            (Some((_, m)), _) => (m, true),
            (None, Some(m)) => (m, false),
            (None, None) => {
                return Err(self.fail(&format!("{label}: no isotropic theta clears a3")))
            }
        };
        let note = if reached { "a7 != 0" } else { "a7 = 0" };
        self.theta(m, &format!("{label}: theta, isotropic first row, {note}"))?;
        self.expect_zero(&[3], label)?;
        Ok(reached)
    }

    /// Tries `make(alpha)` followed by an isotropic `Theta` for the generic
    /// parameters in turn, keeping the first that yields `a3 = 0, a7 != 0`.
    fn generic_then_isotropic(
        &mut self,
        label: &str,
        make: impl Fn(Complex) -> Move<Complex>,
    ) -> Result<()> {
        for (re, im) in GENERIC_PARAMETERS {
            let mut trial = Walk {
                input: self.input.clone(),
                t: self.t.clone(),
                v: self.v,
                tol: self.tol,
                word: Vec::new(),
                log: Vec::new(),
                max_seen: self.max_seen,
                err_scale: self.err_scale,
            };
            let alpha = Complex::new(re, im);
            trial.apply(
                make(alpha),
                &format!("{label}: generic move, alpha = {alpha}"),
            )?;
            let reached = match trial.theta_isotropic(label) {
                Ok(true) => true,
                Ok(false) | Err(Error::Ambiguous { .. }) | Err(Error::CaseDispatch { .. }) => false,
                Err(e) => return Err(e),
            };
            if reached {
                self.t = trial.t;
                self.max_seen = trial.max_seen;
                self.err_scale = trial.err_scale;
                self.word.extend(trial.word);
                self.log.extend(trial.log);
                return Ok(());
            }
        }
        Err(self.fail(&format!("{label}: no generic parameter reaches a7 != 0")))
    }

    /// `(0, a4, a5, a6, a7, a8, a9)` with `a7 != 0`: clear `a5` (which clears
    /// `a4`), leaving a perfect-cube cubic.
    fn clear_quadratic(&mut self, label: &str) -> Result<()> {
        if !self.negligible(5) {
            let alpha = -self.a(5) / (self.a(7) * 2.0);
            self.apply(
                Move::psi_quad(alpha),
                &format!("{label}: Y += alpha X^2, alpha = -a5/(2 a7)"),
            )?;
        }
        self.expect_zero(&[4, 5], label)
    }

    /// Calogero-Moser finish from `a3 = 0`, `a7 != 0` to the zero tuple.
    fn finish_cm(&mut self) -> Result<()> {
        let label = "a7 != 0";
        self.clear_quadratic(label)?;
        let rho = self.a(8) / self.a(7);
        let one = c(1.0);
        self.theta(
            [[-rho, one], [-one - rho, one]],
            &format!("{label}: theta [[-a8/a7, 1], [-1-a8/a7, 1]]"),
        )?;
        self.expect_zero(&[3, 4, 5, 6, 7, 8], label)?;
        if !self.negligible(9) {
            let alpha = -self.a(9) / self.v;
            self.apply(
                Move::psi_quad(alpha),
                &format!("{label}: Y += alpha X^2, alpha = a9/3"),
            )?;
        }
        self.expect_zero(&[9], label)
    }

    /// Calogero-Moser case `a3 = a7 = 0`.
    fn cm_a7_zero(&mut self) -> Result<()> {
        if !self.is_zero(8)? {
            let label = "a3 = a7 = 0, a8 != 0";
            self.log.push(label.into());
            self.expect_zero(&[4, 6], label)?;
            if !self.negligible(9) {
                let alpha = -self.a(9) / self.v;
                self.apply(
                    Move::psi_quad(alpha),
                    &format!("{label}: Y += alpha X^2, alpha = a9/3"),
                )?;
                self.expect_zero(&[9], label)?;
            }
            self.generic_then_isotropic(label, Move::phi_quad)?;
            return self.finish_cm();
        }
        if !self.is_zero(6)? {
            let label = "a3 = a7 = a8 = 0, a6 != 0";
            self.expect_zero(&[5], label)?;
            let alpha = -self.a(4) / self.a(6);
            self.apply(
                Move::psi_quad(alpha),
                &format!("{label}: Y += alpha X^2, alpha = -a4/a6"),
            )?;
            self.expect_zero(&[4, 5, 7, 8, 9], label)?;
            let beta = -self.a(6) / self.v;
            self.apply(
                Move::phi_quad(beta),
                &format!("{label}: X += beta Y^2, beta = a6/3"),
            )?;
            return self.expect_zero(&[3, 4, 5, 6, 7, 8, 9], label);
        }
        let label = "a3 = a6 = a7 = a8 = 0";
        if !self.negligible(9) {
            let alpha = -self.a(9) / (self.a(4) * self.a(4) + self.v);
            self.apply(
                Move::psi_quad(alpha),
                &format!("{label}: Y += alpha X^2, alpha = -a9/(a4^2 + v)"),
            )?;
            self.expect_zero(&[3, 6, 7, 8, 9], label)?;
        }
        if self.all_zero()? {
            self.log.push(format!("{label}: reached zero"));
            return Ok(());
        }
        if self.is_zero(4)? {
            return Err(self.fail(&format!("{label}: a4 = 0 forces a5 = 0")));
        }
        let one = c(1.0);
        let zero = c(0.0);
        if self.is_zero(5)? {
            let label = "a3 = a5 = a6 = a7 = a8 = a9 = 0";
            self.apply(Move::phi_quad(one), &format!("{label}: X += Y^2"))?;
            self.theta(
                [[one, zero], [one, one]],
                &format!("{label}: theta [[1, 0], [1, 1]]"),
            )?;
            self.expect_zero(&[3], label)?;
            if self.is_zero(7)? {
                return Err(self.fail(&format!("{label}: expected a7 != 0")));
            }
        } else {
            let label = "a3 = a6 = a7 = a8 = a9 = 0, a5 != 0";
            self.apply(Move::psi_quad(one), &format!("{label}: Y += X^2"))?;
            if !self.theta_isotropic(label)? {
                return Err(self.fail(&format!("{label}: expected a7 != 0")));
            }
        }
        self.finish_cm()
    }

    /// Commuting finish from `a3 = 0`, `a7 != 0` to `(0, .., 0, 1)`.
    fn finish_generic(&mut self) -> Result<OrbitLabel> {
        let label = "a7 != 0";
        self.clear_quadratic(label)?;
        let rho = self.a(8) / self.a(7);
        let k = cbrt_branch(self.a(6), 0);
        let one = c(1.0);
        self.theta(
            [[rho * k, -k], [(one + rho) / k, -one / k]],
            &format!("{label}: theta [[rho k, -k], [(1 + rho)/k, -1/k]], rho = a8/a7, k^3 = a6"),
        )?;
        self.expect_zero(&[3, 4, 5, 6, 7, 8], label)?;
        if !self.classify(self.a(9) - one, self.err_scale, "a9 = 1?")? {
            return Err(self.fail(&format!("{label}: a9 = {} should be 1", self.a(9))));
        }
        self.t.set(9, one);
        Ok(OrbitLabel::Generic)
    }

    /// Commuting case `a3 = a7 = 0`.
    fn commuting_a7_zero(&mut self) -> Result<OrbitLabel> {
        let one = c(1.0);
        let zero = c(0.0);
        self.expect_zero(&[8], "a3 = a7 = 0")?;
        if !self.is_zero(6)? {
            let label = "a3 = a7 = 0, a6 != 0";
            self.expect_zero(&[5], label)?;
            if !self.negligible(4) {
                let alpha = -self.a(4) / self.a(6);
                self.apply(
                    Move::psi_quad(alpha),
                    &format!("{label}: Y += alpha X^2, alpha = -a4/a6"),
                )?;
            }
            self.expect_zero(&[4, 5, 7, 8, 9], label)?;
            self.theta(
                [[one, -one], [one, zero]],
                &format!("{label}: theta [[1, -1], [1, 0]]"),
            )?;
            return self.finish_generic();
        }
        self.expect_zero(&[4], "a3 = a6 = a7 = 0")?;
        let (z5, z9) = (self.is_zero(5)?, self.is_zero(9)?);
        let shear = [[one, one], [zero, one]];
        match (z5, z9) {
            (true, true) => {
                self.log.push("all coordinates vanish".into());
                self.expect_zero(&[3, 4, 5, 6, 7, 8, 9], "zero")?;
                Ok(OrbitLabel::Zero)
            }
            (true, false) => {
                let label = "only a9 != 0";
                self.theta(shear, &format!("{label}: theta [[1, 1], [0, 1]]"))?;
                self.finish_generic()
            }
            (false, true) => {
                let label = "only a5 != 0";
                self.theta(shear, &format!("{label}: theta [[1, 1], [0, 1]]"))?;
                let alpha = sqrt_branch(c(-6.0) / self.a(5), 0);
                self.apply(
                    Move::phi_quad(alpha),
                    &format!("{label}: X += alpha Y^2, alpha^2 = -6/a5"),
                )?;
                self.expect_zero(&[3], label)?;
                if self.is_zero(7)? {
                    return Err(self.fail(&format!("{label}: expected a7 != 0")));
                }
                self.finish_generic()
            }
            (false, false) => {
                let (a5, a9) = (self.a(5), self.a(9));
                let gap = a5 * a5 * a5 - a9 * a9 * 6.0;
                let scale = a5.norm().powi(3).max(6.0 * a9.norm().powi(2));
                if self.classify(gap, scale, "a5^3 = 6 a9^2?")? {
                    self.reach_special()
                } else {
                    let label = "a5, a9 != 0, a5^3 != 6 a9^2";
                    self.theta(shear, &format!("{label}: theta [[1, 1], [0, 1]]"))?;
                    self.generic_then_isotropic(label, Move::psi_quad)?;
                    self.finish_generic()
                }
            }
        }
    }

    /// `(0, 0, a5, 0, 0, 0, a9)` with `a5^3 = 6 a9^2` to the special
    /// representative by `diag(1/l, l)`, `l^3 = 1/a9`, on the cube-root
    /// branch where `l^2 a5` is the real cube root of 6.
    fn reach_special(&mut self) -> Result<OrbitLabel> {
        let label = "a5^3 = 6 a9^2";
        let target = 6f64.cbrt();
        let (a5, a9) = (self.a(5), self.a(9));
        let lambda = (0..3)
            .map(|b| cbrt_branch(c(1.0) / a9, b))
            .min_by(|x, y| {
                let dx = (x * x * a5 - target).norm();
                let dy = (y * y * a5 - target).norm();
                dx.total_cmp(&dy)
            })
            .expect("three branches");
        if !self.classify(lambda - 1.0, 1.0, "scaling = identity?")? {
            let zero = c(0.0);
            self.theta(
                [[c(1.0) / lambda, zero], [zero, lambda]],
                &format!("{label}: theta diag(1/l, l), l^3 = 1/a9"),
            )?;
        } else {
            self.log
                .push(format!("{label}: already the representative"));
        }
        self.expect_zero(&[3, 4, 6, 7, 8], label)?;
        let rep = OrbitLabel::Special.representative();
        for k in [5, 9] {
            if !self.classify(
                self.a(k) - rep.a(k),
                self.err_scale,
                &format!("a{k} at the representative?"),
            )? {
                return Err(self.fail(&format!(
                    "{label}: a{k} = {} off the representative",
                    self.a(k)
                )));
            }
        }
        self.t = rep;
        Ok(OrbitLabel::Special)
    }

    fn finish(
        self,
        representative: &ReducedTuple<Complex>,
        bound: usize,
    ) -> Result<NormalizationResult> {
        let word = GroupWord(self.word);
        if word.len() > bound {
            return Err(Error::CaseDispatch {
                step: format!("word length {} exceeds {bound}", word.len()),
                log: self.log,
            });
        }
        let replay = act_tuple_word(&word, &self.input, &self.v)?;
        let residual = replay.distance(representative);
        let allowed = 10.0 * self.tol.bound(self.err_scale.max(1.0));
        if residual > allowed {
            return Err(Error::CaseDispatch {
                step: format!("replay residual {residual:e} exceeds {allowed:e}"),
                log: self.log,
            });
        }
        Ok(NormalizationResult {
            word,
            terminal: self.t,
            residual,
            branch_log: self.log,
        })
    }
}

fn check_on_variety(
    res: &ResidualVector<Complex>,
    t: &ReducedTuple<Complex>,
    tol: &TolerancePolicy,
) -> Result<()> {
    let s = t.max_magnitude().max(1.0);
    let scale = 10.0 * s.powi(3);
    for r in &res.entries {
        match tol.classify(r.value.norm(), scale) {
            ZeroTest::Zero => {}
            ZeroTest::NonZero => {
                return Err(Error::OffVariety {
                    relation: r.id.clone(),
                    magnitude: r.value.norm(),
                })
            }
            ZeroTest::Ambiguous => {
                return Err(Error::Ambiguous {
                    context: format!("relation {}", r.id),
                    magnitude: r.value.norm(),
                    lower: tol.bound(scale),
                    upper: 10.0 * tol.bound(scale),
                })
            }
        }
    }
    Ok(())
}

/// Word carrying a point of the Calogero-Moser tuple variety to zero.
pub fn normalize_d3(
    t: &ReducedTuple<Complex>,
    tol: &TolerancePolicy,
) -> Result<NormalizationResult> {
    check_on_variety(&eval_id1z(t), t, tol)?;
    let mut walk = Walk::new(t, CM_V, *tol);
    if !walk.all_zero()? {
        if !walk.negligible(3) {
            walk.theta_isotropic("a3 != 0")?;
        }
        if walk.is_zero(7)? {
            walk.cm_a7_zero()?;
        } else {
            walk.finish_cm()?;
        }
    }
    walk.expect_zero(&[3, 4, 5, 6, 7, 8, 9], "terminal")?;
    walk.finish(&OrbitLabel::Zero.representative(), NORMALIZE_WORD_BOUND)
}

/// Orbit of a point of the commuting tuple variety, with the word carrying
/// it to the orbit representative.
pub fn classify_d30(
    t: &ReducedTuple<Complex>,
    tol: &TolerancePolicy,
) -> Result<(OrbitLabel, NormalizationResult)> {
    check_on_variety(&eval_id2z(t), t, tol)?;
    let mut walk = Walk::new(t, COMMUTING_V, *tol);
    let label = if walk.all_zero()? {
        walk.expect_zero(&[3, 4, 5, 6, 7, 8, 9], "zero")?;
        OrbitLabel::Zero
    } else {
        if !walk.negligible(3) {
            walk.theta_isotropic("a3 != 0")?;
        }
        if walk.is_zero(7)? {
            walk.commuting_a7_zero()?
        } else {
            walk.finish_generic()?
        }
    };
    let result = walk.finish(&label.representative(), CLASSIFY_WORD_BOUND)?;
    Ok((label, result))
}

/// Moves that shift `tr X` and `tr Y` to zero; they leave `a3..a9` alone.
pub fn translation_word(a1: Complex, a2: Complex) -> GroupWord<Complex> {
    let mut w = Vec::new();
    if a1 != Complex::new(0.0, 0.0) {
        w.push(Move::PhiPoly(vec![-a1 / 3.0]));
    }
    if a2 != Complex::new(0.0, 0.0) {
        w.push(Move::PsiPoly(vec![-a2 / 3.0]));
    }
    GroupWord(w)
}

fn split_full(a: &[Complex; 9]) -> (GroupWord<Complex>, ReducedTuple<Complex>) {
    let reduced = ReducedTuple(std::array::from_fn(|i| a[i + 2]));
    (translation_word(a[0], a[1]), reduced)
}

fn prepend(prefix: GroupWord<Complex>, mut r: NormalizationResult) -> NormalizationResult {
    if !prefix.is_empty() {
        r.branch_log.insert(0, "shift traces to zero".into());
        let mut moves = prefix.0;
        moves.extend(r.word.0);
        r.word = GroupWord(moves);
    }
    r
}

/// [`normalize_d3`] for a full tuple `(a1, .., a9)`: constant moves clearing
/// `a1`, `a2` come first.
pub fn normalize_d3_full(a: &[Complex; 9], tol: &TolerancePolicy) -> Result<NormalizationResult> {
    let (prefix, reduced) = split_full(a);
    normalize_d3(&reduced, tol).map(|r| prepend(prefix, r))
}

/// [`classify_d30`] for a full tuple `(a1, .., a9)`.
pub fn classify_d30_full(
    a: &[Complex; 9],
    tol: &TolerancePolicy,
) -> Result<(OrbitLabel, NormalizationResult)> {
    let (prefix, reduced) = split_full(a);
    classify_d30(&reduced, tol).map(|(l, r)| (l, prepend(prefix, r)))
}

pub fn normalize_batch(
    inputs: &[ReducedTuple<Complex>],
    tol: &TolerancePolicy,
    exec: Execution,
) -> Vec<Result<NormalizationResult>> {
    exec.map(inputs.len(), |i| normalize_d3(&inputs[i], tol))
}

pub fn classify_batch(
    inputs: &[ReducedTuple<Complex>],
    tol: &TolerancePolicy,
    exec: Execution,
) -> Vec<Result<(OrbitLabel, NormalizationResult)>> {
    exec.map(inputs.len(), |i| classify_d30(&inputs[i], tol))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn tuple(v: [f64; 7]) -> ReducedTuple<Complex> {
        ReducedTuple(v.map(c))
    }

    fn tol() -> TolerancePolicy {
        TolerancePolicy::default()
    }

    #[test]
    fn zero_tuple_is_fixed() {
        let r = normalize_d3(&ReducedTuple::zero(), &tol()).unwrap();
        assert!(r.word.is_empty());
        assert_eq!(r.residual, 0.0);
        let (label, r) = classify_d30(&ReducedTuple::zero(), &tol()).unwrap();
        assert_eq!(label, OrbitLabel::Zero);
        assert!(r.word.is_empty());
    }

    #[test]
    fn lone_cubic_coordinate_takes_two_moves() {
        let r = normalize_d3(&tuple([0.0, 0.0, 0.0, 5.0, 0.0, 0.0, 0.0]), &tol()).unwrap();
        assert_eq!(r.word.len(), 2);
        assert!(r.residual < 1e-12);
    }

    #[test]
    fn calogero_point_reaches_zero() {
        let r = normalize_d3(&tuple([2.0, 0.0, -4.5, 0.0, 0.0, 0.0, 0.0]), &tol()).unwrap();
        assert!(r.residual < 1e-6, "{r:?}");
        assert!(r.word.len() <= NORMALIZE_WORD_BOUND);
        assert_eq!(r.terminal, ReducedTuple::zero());
    }

    #[test]
    fn representatives_classify_to_themselves() {
        for label in [OrbitLabel::Zero, OrbitLabel::Special, OrbitLabel::Generic] {
            let (got, r) = classify_d30(&label.representative(), &tol()).unwrap();
            assert_eq!(got, label);
            assert!(r.residual < 1e-12);
        }
        let (_, r) = classify_d30(&OrbitLabel::Special.representative(), &tol()).unwrap();
        assert!(r.word.is_empty());
    }

    #[test]
    fn diagonal_commuting_tuple() {
        let t = tuple([2.0, 0.0, 2.0 / 3.0, 0.0, 2.0 / 3.0, 0.0, -2.0 / 9.0]);
        let (label, r) = classify_d30(&t, &tol()).unwrap();
        assert_eq!(label, OrbitLabel::Generic);
        assert!(r.residual < 1e-9);
    }

    #[test]
    fn off_variety_input_is_refused() {
        let t = tuple([1.0, 0.0, 0.0, 0.0, 0.0, 0.0, 0.0]);
        assert!(matches!(
            normalize_d3(&t, &tol()),
            Err(Error::OffVariety { .. })
        ));
        let t = tuple([0.0, 0.0, 0.0, 1.0, 0.0, 0.0, 1.0]);
        assert!(matches!(
            classify_d30(&t, &tol()),
            Err(Error::OffVariety { .. })
        ));
    }

    #[test]
    fn full_tuple_prefixes_translations() {
        let mut a = [c(0.0); 9];
        a[0] = c(3.0);
        a[2] = c(2.0);
        a[4] = c(-4.5);
        let r = normalize_d3_full(&a, &tol()).unwrap();
        assert_eq!(r.word.0[0], Move::PhiPoly(vec![c(-1.0)]));
        assert_eq!(r.branch_log[0], "shift traces to zero");
    }

    fn normalized(v: [f64; 7]) -> NormalizationResult {
        let r = normalize_d3(&tuple(v), &tol()).unwrap_or_else(|e| panic!("{v:?}: {e}"));
        assert!(r.residual < 1e-9, "{v:?}: {r:?}");
        assert!(r.word.len() <= NORMALIZE_WORD_BOUND);
        r
    }

    fn logged(r: &NormalizationResult, fragment: &str) -> bool {
        r.branch_log.iter().any(|l| l.starts_with(fragment))
    }

    #[test]
    fn every_calogero_branch_is_reachable() {
        assert!(logged(
            &normalized([0.0, 0.0, 6.0, 0.0, 0.0, 3.0, 7.0]),
            "a3 = a7 = 0, a8 != 0"
        ));
        assert!(logged(
            &normalized([0.0, 1.0, 0.0, 5.0, 0.0, 0.0, -8.0 / 15.0]),
            "a3 = a7 = a8 = 0, a6 != 0"
        ));
        assert!(logged(
            &normalized([0.0, 3.0, 0.0, 0.0, 0.0, 0.0, 5.0]),
            "a3 = a5 = a6"
        ));
        assert!(logged(
            &normalized([0.0, -3.0, 4.0, 0.0, 0.0, 0.0, 5.0]),
            "a3 = a6 = a7 = a8 = a9 = 0, a5 != 0"
        ));
        assert!(logged(
            &normalized([0.0, 0.0, 0.0, 0.0, 0.0, 0.0, 4.0]),
            "a3 = a6 = a7 = a8 = 0"
        ));
    }

    fn classified(v: [f64; 7]) -> (OrbitLabel, NormalizationResult) {
        let (label, r) = classify_d30(&tuple(v), &tol()).unwrap_or_else(|e| panic!("{v:?}: {e}"));
        assert!(r.residual < 1e-9, "{v:?}: {r:?}");
        assert!(r.word.len() <= CLASSIFY_WORD_BOUND);
        assert_eq!(r.terminal, label.representative());
        (label, r)
    }

    #[test]
    fn every_commuting_branch_is_reachable() {
        let (l, r) = classified([0.0, 3.0, 0.0, 1.0, 0.0, 0.0, 9.0]);
        assert!(l == OrbitLabel::Generic && logged(&r, "a3 = a7 = 0, a6 != 0"));
        let (l, r) = classified([0.0, 0.0, 0.0, 0.0, 0.0, 0.0, 5.0]);
        assert!(l == OrbitLabel::Generic && logged(&r, "only a9"));
        let (l, r) = classified([0.0, 0.0, 5.0, 0.0, 0.0, 0.0, 0.0]);
        assert!(l == OrbitLabel::Generic && logged(&r, "only a5"));
        let (l, r) = classified([0.0, 0.0, 1.0, 0.0, 0.0, 0.0, 1.0]);
        assert!(l == OrbitLabel::Generic && logged(&r, "a5, a9 != 0"));
        let (l, _) = classified([0.0, 0.0, 4.0 * 6f64.cbrt(), 0.0, 0.0, 0.0, -8.0]);
        assert_eq!(l, OrbitLabel::Special);
        let (l, _) = classified([1.0, 0.0, 0.0, 0.0, 0.0, 0.0, 0.0]);
        assert_eq!(l, OrbitLabel::Generic);
    }

    #[test]
    fn guard_band_refuses_near_ties() {
        let t = tuple([
            0.0,
            0.0,
            1.0,
            0.0,
            0.0,
            0.0,
            (1.0f64 / 6.0).sqrt() * (1.0 + 5e-9),
        ]);
        assert!(matches!(
            classify_d30(&t, &tol()),
            Err(Error::Ambiguous { .. })
        ));
    }
}
