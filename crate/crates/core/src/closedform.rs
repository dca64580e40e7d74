//! Closed-form characteristic impedances, propagation factor and pass bands.
//!
//! All impedances depend on `(ω, L, C)` only through `ωL` and `ωC`. Regime
//! dispatch is on `x = ω²LC`; band endpoints belong to the stop band.

use num_complex::Complex64;
use serde::Serialize;

use crate::circuit::EvalContext;
use crate::error::{Error, Result};
use crate::families::{FamilyImpedance, FamilyParams};
use crate::limits::{default_start, iterate_family};

/// Relative tolerance for deciding that a real part is positive.
pub const IMAG_RTOL: f64 = 1e-12;

/// Regularization used to pick the physical root when both are imaginary.
pub const BRANCH_EPSILON: f64 = 1e-6;

/// Open interval of angular frequencies where the characteristic impedance
/// has strictly positive real part.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct FilterBand {
    pub omega_lo: f64,
    /// May be `f64::INFINITY`.
    pub omega_hi: f64,
    pub nonempty: bool,
}

impl FilterBand {
    pub fn new(omega_lo: f64, omega_hi: f64) -> Self {
        FilterBand {
            omega_lo,
            omega_hi,
            nonempty: omega_lo < omega_hi,
        }
    }

    pub fn empty() -> Self {
        FilterBand {
            omega_lo: f64::NAN,
            omega_hi: f64::NAN,
            nonempty: false,
        }
    }

    /// Strict containment; endpoints are outside.
    pub fn contains(&self, omega: f64) -> bool {
        self.nonempty && self.omega_lo < omega && omega < self.omega_hi
    }
}

fn check_positive(omega: f64, l: f64, c: f64) -> Result<()> {
    if [omega, l, c].iter().all(|v| v.is_finite() && *v > 0.0) {
        Ok(())
    } else {
        Err(Error::InvalidParameter(format!(
            "need ω, L, C > 0, got ω = {omega}, L = {l}, C = {c}"
        )))
    }
}

fn check_ratio(r: f64) -> Result<()> {
    if r > 0.0 && r < 1.0 {
        Ok(())
    } else {
        Err(Error::InvalidParameter(format!("need 0 < r < 1, got r = {r}")))
    }
}

/// Ladder characteristic impedance.
///
/// Below `ω²LC = 4` the impedance is `(iωLC + √(4LC − ω²L²C²)) / 2C`, with a
/// positive real part; above, it is `i(ωLC + √(ω²L²C² − 4LC)) / 2C`.
pub fn ladder_z(omega: f64, l: f64, c: f64) -> Result<Complex64> {
    check_positive(omega, l, c)?;
    let lc = l * c;
    let wlc = omega * lc;
    let d = wlc * wlc - 4.0 * lc;
    Ok(if d < 0.0 {
        Complex64::new((-d).sqrt(), wlc) / (2.0 * c)
    } else {
        Complex64::new(0.0, wlc + d.sqrt()) / (2.0 * c)
    })
}

/// Per-cell voltage ratio `(Z − iωL)/Z` from the series-inductor divider.
/// Unit modulus below `ω²LC = 4`, strictly smaller above.
pub fn ladder_alpha(omega: f64, l: f64, c: f64) -> Result<Complex64> {
    let z = ladder_z(omega, l, c)?;
    Ok((z - Complex64::new(0.0, omega * l)) / z)
}

/// The ladder passes frequencies below `2/√(LC)`.
pub fn ladder_band(l: f64, c: f64) -> Result<FilterBand> {
    check_positive(1.0, l, c)?;
    Ok(FilterBand::new(0.0, 2.0 / (l * c).sqrt()))
}

/// Band edges of the gasket circuit in terms of `2ω²LC`.
fn sg_edges() -> (f64, f64) {
    let s = 15f64.sqrt();
    (9.0 * (4.0 - s), 9.0 * (4.0 + s))
}

/// Characteristic side impedance of the modified gasket circuit.
pub fn sg_z(omega: f64, l: f64, c: f64) -> Result<Complex64> {
    check_positive(omega, l, c)?;
    let x = omega * omega * l * c;
    let (lo, hi) = sg_edges();
    let pre = 1.0 / (10.0 * omega * c);
    let a = 2.0 * x + 9.0;
    let t = 2.0 * x;
    Ok(if lo < t && t < hi {
        let root = (144.0 * x - 4.0 * x * x - 81.0).max(0.0).sqrt();
        Complex64::new(pre * root, pre * a)
    } else {
        let root = (4.0 * x * x + 81.0 - 144.0 * x).max(0.0).sqrt();
        if t <= lo {
            // a − root, rationalized: (a² − root²) / (a + root) = 180x / (a + root)
            Complex64::new(0.0, pre * 180.0 * x / (a + root))
        } else {
            Complex64::new(0.0, pre * (a + root))
        }
    })
}

/// `9(4 − √15) < 2ω²LC < 9(4 + √15)`.
pub fn sg_band(l: f64, c: f64) -> Result<FilterBand> {
    check_positive(1.0, l, c)?;
    let (lo, hi) = sg_edges();
    let lc = l * c;
    Ok(FilterBand::new((lo / (2.0 * lc)).sqrt(), (hi / (2.0 * lc)).sqrt()))
}

/// `γ(r) = 1 + r(3 − 5r)/(2r − 1)²`.
pub fn hanoi_gamma(r: f64) -> Result<f64> {
    check_ratio(r)?;
    if r == 0.5 {
        return Err(Error::SingularParameter("γ(r) is singular at r = 1/2".into()));
    }
    let d = 2.0 * r - 1.0;
    Ok(1.0 + r * (3.0 - 5.0 * r) / (d * d))
}

/// Pass band of the hanoi circuit: the frequencies where the lateral
/// impedance has positive real part.
///
/// That happens exactly when the quadratic for `Z_ℓ` has a negative
/// discriminant, i.e. `γ − √(γ² − 1) < ω²LC/2 < γ + √(γ² − 1)` for
/// `0 < r < 3/5`. At `r = 1/2` every frequency passes; for `r ≥ 3/5` none does.
pub fn hanoi_band(r: f64, l: f64, c: f64) -> Result<FilterBand> {
    check_positive(1.0, l, c)?;
    check_ratio(r)?;
    if r == 0.5 {
        return Ok(FilterBand::new(0.0, f64::INFINITY));
    }
    if r >= 0.6 {
        return Ok(FilterBand::empty());
    }
    let g = hanoi_gamma(r)?;
    let spread = (g * g - 1.0).sqrt();
    let upper = g + spread;
    // the two roots multiply to one
    let lower = 1.0 / upper;
    let lc = l * c;
    Ok(FilterBand::new((2.0 * lower / lc).sqrt(), (2.0 * upper / lc).sqrt()))
}

/// Vertical and lateral impedances of the self-similar hanoi star.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct HanoiSolution {
    pub z_v: Complex64,
    pub z_l: Complex64,
    pub physical: bool,
}

impl HanoiSolution {
    pub fn as_family(&self) -> FamilyImpedance {
        FamilyImpedance::Pair {
            zv: self.z_v,
            zl: self.z_l,
        }
    }
}

fn positive_enough(z: Complex64) -> bool {
    z.re > IMAG_RTOL * z.norm().max(1.0)
}

fn not_negative(z: Complex64) -> bool {
    z.re >= -IMAG_RTOL * z.norm().max(1.0)
}

/// Solves the self-similarity equations of the hanoi star.
///
/// The lateral leg solves `r(5r−3)iωC Z² + (2r−1)(2−ω²LC) Z + iωL = 0`, and
/// the vertical leg follows from `(2−3r)Z_v + (1−2r)Z_ℓ = 1/(iωC)`. In the
/// pass band exactly one root has positive real part. Outside it both roots
/// are imaginary and the one reached by the regularized iteration (at
/// ε = [`BRANCH_EPSILON`]) is returned. At `r = 3/5` the quadratic
/// degenerates to a linear equation whose solution is returned flagged as
/// unphysical. Above `3/5` the regularized iteration diverges, so the
/// smaller imaginary root is returned, also flagged as unphysical.
pub fn hanoi_solve(omega: f64, l: f64, c: f64, r: f64) -> Result<HanoiSolution> {
    check_positive(omega, l, c)?;
    check_ratio(r)?;
    let x = omega * omega * l * c;
    let i = Complex64::i();
    let inv_iwc = -i / (omega * c);

    if r == 0.5 {
        return Ok(HanoiSolution {
            z_v: inv_iwc * 2.0,
            z_l: Complex64::new(2.0 * (l / c).sqrt(), 0.0),
            physical: true,
        });
    }
    if r == 0.6 {
        let d = 2.0 - x;
        if !(d.abs() > IMAG_RTOL * 2.0) {
            return Err(Error::Resonance("degenerate hanoi solution at ω²LC = 2"));
        }
        return Ok(HanoiSolution {
            z_v: inv_iwc * (10.0 / d),
            z_l: i * (-5.0 * omega * l / d),
            physical: false,
        });
    }

    // a = i·qa, b real, c = iωL
    let qa = r * (5.0 * r - 3.0) * omega * c;
    let b = (2.0 * r - 1.0) * (2.0 - x);
    let disc = b * b + 4.0 * r * (5.0 * r - 3.0) * x;
    let half = 1.0 / (2.0 * qa);
    let z_l = if disc < 0.0 {
        let re = (-disc).sqrt() * half.abs();
        Some(Complex64::new(re, b * half))
    } else {
        None
    };
    let z_l = match z_l {
        Some(z) if positive_enough(z) => z,
        _ => {
            // both roots (numerically) imaginary: i(b ∓ √disc)/(2qa)
            let root = disc.max(0.0).sqrt();
            let candidates = [
                Complex64::new(0.0, (b - root) * half),
                Complex64::new(0.0, (b + root) * half),
            ];
            let [p, q] = candidates;
            if r > 0.6 {
                // no regularized limit exists; report the smaller root
                if p.norm() <= q.norm() {
                    p
                } else {
                    q
                }
            } else {
                let reference = regularized_lateral(omega, l, c, r)?;
                if (p - reference).norm() <= (q - reference).norm() {
                    p
                } else {
                    q
                }
            }
        }
    };

    let z_v = vertical_from_lateral(z_l, omega, l, c, r)?;
    let sum = z_v + z_l / 2.0;
    Ok(HanoiSolution {
        z_v,
        z_l,
        physical: r < 0.6 && not_negative(sum) && not_negative(z_l),
    })
}

fn vertical_from_lateral(z_l: Complex64, omega: f64, l: f64, c: f64, r: f64) -> Result<Complex64> {
    let i = Complex64::i();
    let inv_iwc = -i / (omega * c);
    let k = 2.0 - 3.0 * r;
    if k.abs() > 1e-9 {
        return Ok((inv_iwc - z_l * (1.0 - 2.0 * r)) / k);
    }
    // r = 2/3: the vertical relation fixes Z_ℓ only, so use the lateral one:
    // 2(1−r)Z_ℓ = (2rZ_ℓ + iωL) ∥ B  with  B = 2rZ_v + 2rZ_ℓ + 2/(iωC)
    let p = z_l * (2.0 * (1.0 - r));
    let a = z_l * (2.0 * r) + i * (omega * l);
    let diff = p.inv() - a.inv();
    if diff.norm() == 0.0 {
        return Err(Error::Resonance("hanoi vertical leg"));
    }
    let big = diff.inv();
    Ok((big - z_l * (2.0 * r) - inv_iwc * 2.0) / (2.0 * r))
}

fn regularized_lateral(omega: f64, l: f64, c: f64, r: f64) -> Result<Complex64> {
    let params = FamilyParams::Hanoi { l, c, r };
    let ctx = EvalContext::new(omega, BRANCH_EPSILON)?;
    let report = iterate_family(&params, &ctx, default_start(&params))?;
    match report.value {
        Some(v) => Ok(v.primary()),
        None => Err(Error::Iteration(format!(
            "regularized hanoi iteration did not settle ({:?})",
            report.status
        ))),
    }
}

/// Relative residuals of the top-to-bottom and left-to-right self-similarity
/// equations for a candidate `(Z_v, Z_ℓ)`.
pub fn hanoi_residuals(z_v: Complex64, z_l: Complex64, omega: f64, l: f64, c: f64, r: f64) -> (f64, f64) {
    let i = Complex64::i();
    let zc = -i / (omega * c);
    let zind = i * (omega * l);
    let rel = |a: Complex64, b: Complex64| (a - b).norm() / a.norm().max(b.norm()).max(f64::MIN_POSITIVE);

    let lhs5 = z_v + z_l / 2.0;
    let rhs5 = z_v * r + (z_v * r + z_l * (2.0 * r) + zc) / 2.0;

    let lhs6 = z_l * 2.0;
    let rhs6 = z_l * (2.0 * r) + ((z_l * (2.0 * r) + zind).inv() + (z_v * (2.0 * r) + z_l * (2.0 * r) + zc * 2.0).inv()).inv();
    (rel(lhs5, rhs5), rel(lhs6, rhs6))
}

/// Closed-form characteristic quantity of any family.
pub fn characteristic(params: &FamilyParams, omega: f64) -> Result<FamilyImpedance> {
    params.validate()?;
    match *params {
        FamilyParams::Ladder { l, c } => ladder_z(omega, l, c).map(FamilyImpedance::Scalar),
        FamilyParams::Sg { l, c } => sg_z(omega, l, c).map(FamilyImpedance::Scalar),
        FamilyParams::Hanoi { l, c, r } => hanoi_solve(omega, l, c, r).map(|s| s.as_family()),
    }
}

/// Pass band of any family.
pub fn band(params: &FamilyParams) -> Result<FilterBand> {
    params.validate()?;
    match *params {
        FamilyParams::Ladder { l, c } => ladder_band(l, c),
        FamilyParams::Sg { l, c } => sg_band(l, c),
        FamilyParams::Hanoi { l, c, r } => hanoi_band(r, l, c),
    }
}
