//! Stable laws in the S0 parameterization.
//!
//! The standardized law `Z = (X - location) / scale` has characteristic
//! function `exp(-t^a - i b tan(pi a / 2) (t - t^a))` for `t > 0` (the phase
//! becomes `b (2/pi) t ln t` at `a = 1`), so densities and distribution
//! functions follow from one-dimensional Fourier integrals over `(0, inf)`.

use std::collections::HashMap;
use std::f64::consts::{FRAC_PI_2, PI};
use std::sync::{Arc, Mutex, OnceLock};

use argmin::core::{CostFunction, Executor, State, TerminationReason};
use argmin::solver::neldermead::NelderMead;
use rand::Rng;
use rand_distr::{Distribution, Exp1};
use serde::{Deserialize, Serialize};

use super::descriptive::{quantile_sorted, sorted, variance};
use crate::error::{Error, Result};
use crate::scalar::Real;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct StableParams<T = f64> {
    /// Stability index in `(0, 2]`.
    pub alpha: T,
    /// Skewness in `[-1, 1]`.
    pub skew: T,
    pub location: T,
    pub scale: T,
}

impl<T: Real> StableParams<T> {
    pub fn new(alpha: T, skew: T, location: T, scale: T) -> Result<Self> {
        let p = StableParams {
            alpha,
            skew,
            location,
            scale,
        };
        p.validate()?;
        Ok(p)
    }

    pub fn validate(&self) -> Result<()> {
        let (a, b) = (self.alpha.as_f64(), self.skew.as_f64());
        if !(a > 0.0 && a <= 2.0) {
            return Err(Error::invalid(format!("stable alpha must lie in (0, 2], got {a}")));
        }
        if !(-1.0..=1.0).contains(&b) {
            return Err(Error::invalid(format!("stable skew must lie in [-1, 1], got {b}")));
        }
        if !(self.scale > T::zero()) || !self.scale.is_finite() || !self.location.is_finite() {
            return Err(Error::invalid(format!(
                "stable law needs finite location and scale > 0, got {}, {}",
                self.location, self.scale
            )));
        }
        Ok(())
    }

    pub fn to_f64(&self) -> StableParams<f64> {
        StableParams {
            alpha: self.alpha.as_f64(),
            skew: self.skew.as_f64(),
            location: self.location.as_f64(),
            scale: self.scale.as_f64(),
        }
    }
}

/// Stability index `min(1/gamma, 2)` of the edge and triangle count limits.
pub fn stable_alpha<T: Real>(gamma: T) -> T {
    (T::one() / gamma).min(T::of(2.0))
}

/// Phase `theta(t)` of the standardized characteristic function.
fn phase(t: f64, alpha: f64, skew: f64) -> f64 {
    if skew == 0.0 {
        return 0.0;
    }
    if (alpha - 1.0).abs() < 1e-9 {
        skew * 2.0 / PI * t * t.ln()
    } else {
        skew * (FRAC_PI_2 * alpha).tan() * (t - t.powf(alpha))
    }
}

/// Integrates `f` over `(0, t_max)` in panels short enough to resolve the
/// oscillation at frequency about `frequency`.
fn oscillatory_integral(f: impl Fn(f64) -> f64, t_max: f64, frequency: f64, tol: f64) -> f64 {
    let width = (PI / (frequency + 1.0)).min(1.0);
    let panels = (t_max / width).ceil().max(1.0) as usize;
    let width = t_max / panels as f64;
    let tol = tol / panels as f64;
    (0..panels)
        .map(|k| quadrature::integrate(&f, k as f64 * width, (k + 1) as f64 * width, tol).integral)
        .sum()
}

/// Truncation point where `t^k exp(-t^alpha)` is negligible.
fn t_max(alpha: f64) -> f64 {
    45f64.powf(1.0 / alpha)
}

fn phase_frequency(z: f64, alpha: f64, skew: f64) -> f64 {
    let drift = if (alpha - 1.0).abs() < 1e-9 {
        2.0 / PI * (1.0 + t_max(alpha).ln().abs())
    } else {
        ((FRAC_PI_2 * alpha).tan() * (1.0 + alpha * t_max(alpha).powf(alpha - 1.0))).abs()
    };
    z.abs() + skew.abs() * drift
}

const TOL: f64 = 1e-12;

/// Standardized density `g(z)`.
fn std_pdf(z: f64, alpha: f64, skew: f64) -> f64 {
    let f = |t: f64| (-t.powf(alpha)).exp() * (t * z + phase(t, alpha, skew)).cos();
    oscillatory_integral(f, t_max(alpha), phase_frequency(z, alpha, skew), TOL) / PI
}

/// Derivative `g'(z)`.
fn std_dpdf(z: f64, alpha: f64, skew: f64) -> f64 {
    let f = |t: f64| -t * (-t.powf(alpha)).exp() * (t * z + phase(t, alpha, skew)).sin();
    oscillatory_integral(f, t_max(alpha), phase_frequency(z, alpha, skew), TOL) / PI
}

/// Standardized distribution function by Gil-Pelaez inversion.
fn std_cdf(z: f64, alpha: f64, skew: f64) -> f64 {
    let f = |t: f64| (-t.powf(alpha)).exp() * (t * z + phase(t, alpha, skew)).sin() / t;
    let v = 0.5 + oscillatory_integral(f, t_max(alpha), phase_frequency(z, alpha, skew), TOL) / PI;
    v.clamp(0.0, 1.0)
}

/// Inside this `|z|` the Fourier integrals are used; outside it the
/// finite-range integral representation, whose cost does not grow with `|z|`
/// and which keeps relative accuracy in the tails.
const FOURIER_LIMIT: f64 = 3.0;

/// `int_a^b f` for an `f` peaked at `split` (or at an end), to relative
/// accuracy. Each side is cut into geometrically shrinking panels toward the
/// peak so that narrow spikes are resolved.
fn peaked_integral(f: impl Fn(f64) -> f64, a: f64, b: f64, split: Option<f64>) -> f64 {
    let panel = |lo: f64, hi: f64| {
        let rough = quadrature::integrate(&f, lo, hi, 1e-15).integral;
        if rough.abs() < 1e-12 {
            quadrature::integrate(&f, lo, hi, (rough.abs() * 1e-12).max(1e-300)).integral
        } else {
            rough
        }
    };
    // Integral between `from` and the peak at `to`.
    let graded = |from: f64, to: f64| {
        let mut sum = 0.0;
        let mut x = from;
        for k in 1..=PEAK_LEVELS {
            let next = to + (from - to) * PEAK_RATIO.powi(k);
            sum += panel(x.min(next), x.max(next));
            x = next;
        }
        sum + panel(x.min(to), x.max(to))
    };
    match split {
        Some(m) if m > a && m < b => graded(a, m) + graded(b, m),
        _ => {
            let mid = 0.5 * (a + b);
            graded(mid, a) + graded(mid, b)
        }
    }
}

const PEAK_RATIO: f64 = 0.125;
const PEAK_LEVELS: i32 = 8;

/// Root of the monotone `w` on `(a, b)`, if it changes sign there.
fn monotone_root(w: impl Fn(f64) -> f64, a: f64, b: f64) -> Option<f64> {
    let eps = (b - a) * 1e-12;
    let (mut lo, mut hi) = (a + eps, b - eps);
    let (wl, wh) = (w(lo), w(hi));
    if !(wl.is_finite() || wh.is_finite()) || wl.signum() == wh.signum() {
        return None;
    }
    for _ in 0..100 {
        let m = 0.5 * (lo + hi);
        if w(m).signum() == wl.signum() {
            lo = m;
        } else {
            hi = m;
        }
    }
    Some(0.5 * (lo + hi))
}

/// Standardized law at one point.
#[derive(Debug, Clone, Copy)]
struct Point {
    pdf: f64,
    dpdf: f64,
    cdf: f64,
    sf: f64,
}

impl Point {
    fn mirrored(self) -> Point {
        Point {
            pdf: self.pdf,
            dpdf: -self.dpdf,
            cdf: self.sf,
            sf: self.cdf,
        }
    }
}

/// Moments `int (hV)^k exp(-hV)` for k = 0, 1, 2 and `int (1 - exp(-hV))`
/// over `(a, b)`, with `hV = exp(w(theta))` monotone in theta.
fn v_integrals(w: &dyn Fn(f64) -> f64, a: f64, b: f64) -> [f64; 4] {
    let split = monotone_root(w, a, b);
    let hv = |t: f64| w(t).exp();
    let moment = |k: i32| {
        peaked_integral(
            |t| {
                let x = hv(t);
                if x.is_finite() { x.powi(k) * (-x).exp() } else { 0.0 }
            },
            a,
            b,
            split,
        )
    };
    let i0c = peaked_integral(|t| -(-hv(t)).exp_m1(), a, b, split);
    [moment(0), moment(1), moment(2), i0c]
}

/// The law at `z` from the Zolotarev integral representation
/// `int exp(-h V(theta)) d theta` over a finite range of theta.
fn zolotarev(z: f64, alpha: f64, skew: f64) -> Point {
    if alpha == 2.0 {
        let pdf = (-z * z / 4.0).exp() / (2.0 * PI.sqrt());
        return Point {
            pdf,
            dpdf: -0.5 * z * pdf,
            cdf: 0.5 * statrs::function::erf::erfc(-z / 2.0),
            sf: 0.5 * statrs::function::erf::erfc(z / 2.0),
        };
    }
    if (alpha - 1.0).abs() < 1e-9 {
        if skew == 0.0 {
            let tail = (1.0 / z.abs()).atan() / PI;
            let (cdf, sf) = if z < 0.0 { (tail, 1.0 - tail) } else { (1.0 - tail, tail) };
            let q = 1.0 + z * z;
            return Point {
                pdf: 1.0 / (PI * q),
                dpdf: -2.0 * z / (PI * q * q),
                cdf,
                sf,
            };
        }
        if skew < 0.0 {
            return zolotarev(-z, alpha, -skew).mirrored();
        }
        let ln_h = -PI * z / (2.0 * skew);
        let w = |t: f64| {
            let k = FRAC_PI_2 + skew * t;
            ln_h + (2.0 / PI).ln() + k.ln() - t.cos().ln() + k * t.tan() / skew
        };
        let [i0, i1, i2, i0c] = v_integrals(&w, -FRAC_PI_2, FRAC_PI_2);
        return Point {
            pdf: i1 / (2.0 * skew),
            dpdf: -PI / (4.0 * skew * skew) * (i1 - i2),
            cdf: i0 / PI,
            sf: i0c / PI,
        };
    }
    let zeta = -skew * (FRAC_PI_2 * alpha).tan();
    if z < zeta {
        return zolotarev(-z, alpha, -skew).mirrored();
    }
    let theta0 = (skew * (FRAC_PI_2 * alpha).tan()).atan() / alpha;
    let u = (z - zeta).max(1e-12 * zeta.abs().max(1.0));
    let r = alpha / (alpha - 1.0);
    let ln_h = r * u.ln();
    let c0 = (alpha * theta0).cos().ln() / (alpha - 1.0);
    let w = |t: f64| {
        ln_h + c0 + r * (t.cos().ln() - (alpha * (theta0 + t)).sin().ln())
            + (alpha * theta0 + (alpha - 1.0) * t).cos().ln()
            - t.cos().ln()
    };
    let [i0, i1, i2, i0c] = v_integrals(&w, -theta0, FRAC_PI_2);
    let k = alpha / (PI * (alpha - 1.0).abs());
    let (cdf, sf) = if alpha > 1.0 {
        ((FRAC_PI_2 - theta0 + i0c) / PI, i0 / PI)
    } else {
        ((FRAC_PI_2 - theta0 + i0) / PI, i0c / PI)
    };
    Point {
        pdf: k * i1 / u,
        dpdf: k * ((r - 1.0) * i1 - r * i2) / (u * u),
        cdf,
        sf,
    }
}

fn evaluate(z: f64, alpha: f64, skew: f64) -> Point {
    if z.abs() <= FOURIER_LIMIT {
        let cdf = std_cdf(z, alpha, skew);
        Point {
            pdf: std_pdf(z, alpha, skew),
            dpdf: std_dpdf(z, alpha, skew),
            cdf,
            sf: 1.0 - cdf,
        }
    } else {
        zolotarev(z, alpha, skew)
    }
}

/// Density of a stable law, by direct numerical inversion.
pub fn stable_pdf<T: Real>(x: T, params: &StableParams<T>) -> Result<T> {
    params.validate()?;
    let p = params.to_f64();
    let z = (x.as_f64() - p.location) / p.scale;
    Ok(T::of(evaluate(z, p.alpha, p.skew).pdf.max(0.0) / p.scale))
}

/// Distribution function of a stable law, by direct numerical inversion.
pub fn stable_cdf<T: Real>(x: T, params: &StableParams<T>) -> Result<T> {
    params.validate()?;
    let p = params.to_f64();
    let z = (x.as_f64() - p.location) / p.scale;
    Ok(T::of(evaluate(z, p.alpha, p.skew).cdf.clamp(0.0, 1.0)))
}

fn hermite(x0: f64, x1: f64, x: f64, y: (f64, f64), dy: (f64, f64)) -> f64 {
    let h = x1 - x0;
    let t = (x - x0) / h;
    let (t2, t3) = (t * t, t * t * t);
    (2.0 * t3 - 3.0 * t2 + 1.0) * y.0 + (t3 - 2.0 * t2 + t) * h * dy.0 + (-2.0 * t3 + 3.0 * t2) * y.1 + (t3 - t2) * h * dy.1
}

/// Heavy tail on one side, tabulated in `ln |z|` as log density and log tail
/// mass, with pure power-law decay past the last point.
#[derive(Debug)]
struct TailTable {
    alpha: f64,
    x0: f64,
    ln_pdf: Vec<f64>,
    /// `d ln g / d ln |z|`.
    dln_pdf: Vec<f64>,
    ln_mass: Vec<f64>,
    dln_mass: Vec<f64>,
}

const TAIL_REACH: f64 = 1e6;
const TAIL_STEP: f64 = 0.05;

impl TailTable {
    /// Tail beyond `edge` (which carries the sign of the side).
    fn build(edge: f64, alpha: f64, skew: f64) -> TailTable {
        let side = edge.signum();
        let x0 = edge.abs().ln();
        let steps = ((TAIL_REACH.ln() - x0) / TAIL_STEP).ceil().max(1.0) as usize;
        let mut t = TailTable {
            alpha,
            x0,
            ln_pdf: Vec::with_capacity(steps + 1),
            dln_pdf: Vec::with_capacity(steps + 1),
            ln_mass: Vec::with_capacity(steps + 1),
            dln_mass: Vec::with_capacity(steps + 1),
        };
        for k in 0..=steps {
            let r = (x0 + k as f64 * TAIL_STEP).exp();
            let p = zolotarev(side * r, alpha, skew);
            let mass = if side > 0.0 { p.sf } else { p.cdf };
            if !(p.pdf > 0.0 && mass > 0.0) {
                break;
            }
            t.ln_pdf.push(p.pdf.ln());
            t.dln_pdf.push(side * r * p.dpdf / p.pdf);
            t.ln_mass.push(mass.ln());
            t.dln_mass.push(-r * p.pdf / mass);
        }
        t
    }

    fn locate(&self, r: f64) -> Option<(usize, f64)> {
        let x = r.ln();
        let k = ((x - self.x0) / TAIL_STEP).floor().max(0.0) as usize;
        (k + 1 < self.ln_pdf.len()).then_some((k, x))
    }

    fn knot(&self, k: usize) -> f64 {
        self.x0 + k as f64 * TAIL_STEP
    }

    fn interpolate(&self, r: f64, y: &[f64], dy: &[f64], decay: f64) -> f64 {
        match self.locate(r) {
            Some((k, x)) => hermite(self.knot(k), self.knot(k + 1), x, (y[k], y[k + 1]), (dy[k], dy[k + 1])).exp(),
            None => {
                let last = y.len() - 1;
                (y[last] - decay * (r.ln() - self.knot(last))).exp()
            }
        }
    }

    fn pdf(&self, r: f64) -> f64 {
        self.interpolate(r, &self.ln_pdf, &self.dln_pdf, self.alpha + 1.0)
    }

    fn mass(&self, r: f64) -> f64 {
        self.interpolate(r, &self.ln_mass, &self.dln_mass, self.alpha)
    }

    /// `|z|` with tail mass `m`, for `m` below the mass at the table start.
    fn radius(&self, m: f64) -> f64 {
        let target = m.ln();
        let last = self.ln_mass.len() - 1;
        if target <= self.ln_mass[last] {
            return (self.knot(last) + (self.ln_mass[last] - target) / self.alpha).exp();
        }
        let k = self.ln_mass.partition_point(|&v| v > target).clamp(1, last) - 1;
        let (mut a, mut b) = (self.knot(k).exp(), self.knot(k + 1).exp());
        for _ in 0..60 {
            let mid = 0.5 * (a + b);
            if self.mass(mid) > m {
                a = mid;
            } else {
                b = mid;
            }
        }
        0.5 * (a + b)
    }
}

/// Tabulated standardized law: density, its derivative and both tail
/// functions on a sinh-spaced grid over `|z| <= GRID_HALF_WIDTH`, with
/// log-log tail tables on heavy sides and log-linear extrapolation on light
/// sides.
#[derive(Debug)]
struct Table {
    s0: f64,
    ds: f64,
    z: Vec<f64>,
    pdf: Vec<f64>,
    dpdf: Vec<f64>,
    cdf: Vec<f64>,
    sf: Vec<f64>,
    left: Option<TailTable>,
    right: Option<TailTable>,
}

const GRID_HALF_WIDTH: f64 = 60.0;
const GRID_STEP: f64 = 0.005;
/// Fourier densities below this are dominated by quadrature error.
const PDF_FLOOR: f64 = 1e-13;

fn grid_z(s: f64) -> f64 {
    2.0 * s.sinh()
}

impl Table {
    fn build(alpha: f64, skew: f64) -> Table {
        let s_max = (GRID_HALF_WIDTH / 2.0).asinh();
        let steps = (2.0 * s_max / GRID_STEP).ceil() as usize;
        let mut z = Vec::with_capacity(steps + 1);
        let mut pdf = Vec::with_capacity(steps + 1);
        let mut dpdf = Vec::with_capacity(steps + 1);
        let mut cdf = Vec::with_capacity(steps + 1);
        let mut sf = Vec::with_capacity(steps + 1);
        let mut lo = None;
        let mut hi = 0;
        for i in 0..=steps {
            let zi = grid_z(-s_max + i as f64 * GRID_STEP);
            let p = evaluate(zi, alpha, skew);
            let floor = if zi.abs() <= FOURIER_LIMIT { PDF_FLOOR } else { f64::MIN_POSITIVE };
            if p.pdf >= floor {
                lo.get_or_insert(i);
                hi = i;
            }
            z.push(zi);
            pdf.push(p.pdf);
            dpdf.push(p.dpdf);
            cdf.push(p.cdf);
            sf.push(p.sf);
        }
        let lo = lo.expect("density is positive near the mode");
        let keep = |v: Vec<f64>| v[lo..=hi].to_vec();
        let (z, mut cdf, mut sf) = (keep(z), keep(cdf), keep(sf));
        for i in 1..cdf.len() {
            cdf[i] = cdf[i].max(cdf[i - 1]);
        }
        for i in (0..sf.len() - 1).rev() {
            sf[i] = sf[i].max(sf[i + 1]);
        }
        let heavy = alpha < 2.0;
        let tail = |edge: f64, heavy: bool| heavy.then(|| TailTable::build(edge, alpha, skew)).filter(|t| t.ln_pdf.len() > 1);
        Table {
            s0: -s_max + lo as f64 * GRID_STEP,
            ds: GRID_STEP,
            left: tail(z[0], heavy && skew < 1.0),
            right: tail(z[z.len() - 1], heavy && skew > -1.0),
            z,
            pdf: keep(pdf),
            dpdf: keep(dpdf),
            cdf,
            sf,
        }
    }

    fn cached(alpha: f64, skew: f64) -> Arc<Table> {
        static CACHE: OnceLock<Mutex<HashMap<(u64, u64), Arc<Table>>>> = OnceLock::new();
        let cache = CACHE.get_or_init(Default::default);
        let key = (alpha.to_bits(), skew.to_bits());
        if let Some(t) = cache.lock().expect("table cache").get(&key) {
            return t.clone();
        }
        let table = Arc::new(Table::build(alpha, skew));
        cache.lock().expect("table cache").insert(key, table.clone());
        table
    }

    fn last(&self) -> usize {
        self.z.len() - 1
    }

    /// Grid cell containing `z`, which must lie inside the grid.
    fn cell(&self, z: f64) -> usize {
        let s = (z / 2.0).asinh();
        let mut i = (((s - self.s0) / self.ds).floor().max(0.0) as usize).min(self.last() - 1);
        while i > 0 && self.z[i] > z {
            i -= 1;
        }
        while i + 1 < self.last() && self.z[i + 1] < z {
            i += 1;
        }
        i
    }

    fn interpolate(&self, z: f64, y: &[f64], dy: &[f64], sign: f64) -> (usize, f64) {
        let i = self.cell(z);
        let v = hermite(self.z[i], self.z[i + 1], z, (y[i], y[i + 1]), (sign * dy[i], sign * dy[i + 1]));
        (i, v)
    }

    /// Light-side decay rate at a grid edge, from the local hazard.
    fn hazard(&self, edge: usize, mass: f64) -> f64 {
        let h = if mass > 0.0 { self.pdf[edge] / mass } else { f64::INFINITY };
        h.max(1.0)
    }

    fn pdf(&self, z: f64) -> f64 {
        let last = self.last();
        let light = |edge: usize| {
            let g0 = self.pdf[edge];
            let slope = (self.dpdf[edge] / g0).abs().max(1.0);
            g0 * (-slope * (z - self.z[edge]).abs()).exp()
        };
        if z < self.z[0] {
            self.left.as_ref().map_or_else(|| light(0), |t| t.pdf(-z))
        } else if z > self.z[last] {
            self.right.as_ref().map_or_else(|| light(last), |t| t.pdf(z))
        } else {
            let (i, v) = self.interpolate(z, &self.pdf, &self.dpdf, 1.0);
            v.max(self.pdf[i].min(self.pdf[i + 1]) * 0.5)
        }
    }

    fn cdf(&self, z: f64) -> f64 {
        let last = self.last();
        if z < self.z[0] {
            match &self.left {
                Some(t) => t.mass(-z),
                None => self.cdf[0] * (-self.hazard(0, self.cdf[0]) * (self.z[0] - z)).exp(),
            }
        } else if z > self.z[last] {
            1.0 - self.sf(z)
        } else {
            let (i, v) = self.interpolate(z, &self.cdf, &self.pdf, 1.0);
            v.clamp(self.cdf[i], self.cdf[i + 1])
        }
    }

    fn sf(&self, z: f64) -> f64 {
        let last = self.last();
        if z > self.z[last] {
            match &self.right {
                Some(t) => t.mass(z),
                None => self.sf[last] * (-self.hazard(last, self.sf[last]) * (z - self.z[last])).exp(),
            }
        } else if z < self.z[0] {
            1.0 - self.cdf(z)
        } else {
            let (i, v) = self.interpolate(z, &self.sf, &self.pdf, -1.0);
            v.clamp(self.sf[i + 1], self.sf[i])
        }
    }

    fn quantile(&self, p: f64) -> f64 {
        let last = self.last();
        if p <= 0.0 {
            return f64::NEG_INFINITY;
        }
        if p >= 1.0 {
            return f64::INFINITY;
        }
        if p < self.cdf[0] {
            return match &self.left {
                Some(t) => -t.radius(p),
                None => self.z[0] + (p / self.cdf[0]).ln() / self.hazard(0, self.cdf[0]),
            };
        }
        let q = 1.0 - p;
        if q < self.sf[last] {
            return match &self.right {
                Some(t) => t.radius(q),
                None => self.z[last] - (q / self.sf[last]).ln() / self.hazard(last, self.sf[last]),
            };
        }
        let i = self.cdf.partition_point(|&c| c < p).clamp(1, last) - 1;
        let (mut a, mut b) = (self.z[i], self.z[i + 1]);
        for _ in 0..60 {
            let m = 0.5 * (a + b);
            if self.cdf(m) < p {
                a = m;
            } else {
                b = m;
            }
        }
        0.5 * (a + b)
    }
}

/// A stable law with a tabulated standardized density, suited to repeated
/// evaluation (likelihoods, quantiles, p-values). Tables are shared between
/// laws with the same `alpha` and skew.
#[derive(Debug, Clone)]
pub struct StableDistribution {
    params: StableParams<f64>,
    table: Arc<Table>,
}

impl StableDistribution {
    pub fn new<T: Real>(params: &StableParams<T>) -> Result<Self> {
        params.validate()?;
        let params = params.to_f64();
        Ok(StableDistribution {
            table: Table::cached(params.alpha, params.skew),
            params,
        })
    }

    pub fn params(&self) -> StableParams<f64> {
        self.params
    }

    fn standardize(&self, x: f64) -> f64 {
        (x - self.params.location) / self.params.scale
    }

    pub fn pdf(&self, x: f64) -> f64 {
        self.table.pdf(self.standardize(x)) / self.params.scale
    }

    pub fn ln_pdf(&self, x: f64) -> f64 {
        self.pdf(x).max(f64::MIN_POSITIVE).ln()
    }

    pub fn cdf(&self, x: f64) -> f64 {
        self.table.cdf(self.standardize(x))
    }

    pub fn sf(&self, x: f64) -> f64 {
        self.table.sf(self.standardize(x))
    }

    pub fn quantile(&self, p: f64) -> f64 {
        self.params.location + self.params.scale * self.table.quantile(p)
    }
}

/// One draw by the Chambers-Mallows-Stuck construction.
pub fn sample_stable<T: Real, R: Rng + ?Sized>(params: &StableParams<T>, rng: &mut R) -> T {
    let p = params.to_f64();
    let (a, b) = (p.alpha, p.skew);
    let v = PI * (rng.gen::<f64>() - 0.5);
    let w: f64 = Exp1.sample(rng);
    let z = if (a - 1.0).abs() < 1e-9 {
        let k = FRAC_PI_2 + b * v;
        2.0 / PI * (k * v.tan() - b * (FRAC_PI_2 * w * v.cos() / k).ln())
    } else {
        let zeta = b * (FRAC_PI_2 * a).tan();
        let shift = zeta.atan() / a;
        let factor = (1.0 + zeta * zeta).powf(0.5 / a);
        let s1 = factor * (a * (v + shift)).sin() / v.cos().powf(1.0 / a)
            * ((v - a * (v + shift)).cos() / w).powf((1.0 - a) / a);
        s1 - zeta
    };
    T::of(p.location + p.scale * z)
}

pub fn sample_stable_n<T: Real, R: Rng + ?Sized>(params: &StableParams<T>, n: usize, rng: &mut R) -> Vec<T> {
    (0..n).map(|_| sample_stable(params, rng)).collect()
}

struct NegLogLik<'a> {
    table: &'a Table,
    ys: &'a [f64],
}

impl CostFunction for NegLogLik<'_> {
    type Param = Vec<f64>;
    type Output = f64;

    fn cost(&self, p: &Vec<f64>) -> std::result::Result<f64, argmin::core::Error> {
        let (mu, log_c) = (p[0], p[1]);
        let c = log_c.exp();
        let ll: f64 = self
            .ys
            .iter()
            .map(|y| self.table.pdf((y - mu) / c).max(f64::MIN_POSITIVE).ln())
            .sum();
        Ok(self.ys.len() as f64 * log_c - ll)
    }
}

/// Maximum-likelihood location and scale of a stable law with `alpha` and
/// skew held fixed.
///
/// The data are first centred and scaled by their median and interquartile
/// range; the simplex search starts from the matching quantile estimates.
pub fn fit_stable_location_scale<T: Real>(samples: &[T], alpha: T, skew: T) -> Result<StableParams<T>> {
    StableParams::new(alpha, skew, T::zero(), T::one())?;
    if samples.len() < 2 {
        return Err(Error::fit(format!("stable fit needs at least 2 samples, got {}", samples.len())));
    }
    let xs = sorted(&samples.iter().map(|x| x.as_f64()).collect::<Vec<_>>());
    let center = quantile_sorted(&xs, 0.5);
    let mut spread = quantile_sorted(&xs, 0.75) - quantile_sorted(&xs, 0.25);
    if !(spread > 0.0) {
        spread = variance(&xs).sqrt();
    }
    if !(spread > 0.0) || !spread.is_finite() {
        return Err(Error::fit("stable fit of a sample without spread"));
    }
    let ys: Vec<f64> = xs.iter().map(|x| (x - center) / spread).collect();
    let table = Table::cached(alpha.as_f64(), skew.as_f64());
    let c0 = 1.0 / (table.quantile(0.75) - table.quantile(0.25));
    let mu0 = -c0 * table.quantile(0.5);
    let start = vec![
        vec![mu0, c0.ln()],
        vec![mu0 + 0.1 * c0, c0.ln()],
        vec![mu0, c0.ln() + 0.1],
    ];
    let problem = NegLogLik {
        table: &table,
        ys: &ys,
    };
    let solver = NelderMead::new(start)
        .with_sd_tolerance(1e-10)
        .map_err(|e| Error::fit(e.to_string()))?;
    let result = Executor::new(problem, solver)
        .configure(|s| s.max_iters(5000))
        .run()
        .map_err(|e| Error::fit(format!("stable likelihood search failed: {e}")))?;
    let state = result.state();
    let converged = matches!(state.get_termination_reason(), Some(TerminationReason::SolverConverged));
    let best = state.get_best_param().cloned().unwrap_or_default();
    if !converged || best.len() != 2 || !state.get_best_cost().is_finite() {
        return Err(Error::fit(format!(
            "stable likelihood search did not converge after {} iterations (status {:?}, cost {})",
            state.get_iter(),
            state.get_termination_status(),
            state.get_best_cost()
        )));
    }
    StableParams::new(
        alpha,
        skew,
        T::of(center + spread * best[0]),
        T::of(spread * best[1].exp()),
    )
    .map_err(|e| Error::fit(e.to_string()))
}
