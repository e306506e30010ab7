use super::nishimori::{nishimori_point, ModelPoint};
use crate::error::{domain, Result};
use crate::scalar::{CompensatedSum, Real};
use num_complex::Complex;
use serde::{Deserialize, Serialize};

/// Fermion sector indices `(α, γ)`.
pub const F00: usize = 0;
pub const F0H: usize = 1;
pub const FH0: usize = 2;
pub const FHH: usize = 3;

/// Spin boundary-condition indices.
pub const PP: usize = 0;
pub const PA: usize = 1;
pub const AP: usize = 2;
pub const AA: usize = 3;

/// Above this value of `2κL` the deep-tail evaluation is used.
const TAIL_SWITCH: f64 = 4.0;

/// Log-magnitude of a partition function, with an explicit zero flag.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct LogMag<T> {
    pub log: T,
    pub is_zero: bool,
}

impl<T: Real> LogMag<T> {
    fn value(log: T) -> Self {
        Self { log, is_zero: false }
    }

    fn zero() -> Self {
        Self { log: T::neg_infinity(), is_zero: true }
    }
}

/// Log partition functions of the four fermion and four spin sectors at `(p, L)`.
///
/// The common prefactor `(2 sinh 2β)^{L²/2}` is omitted everywhere.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SectorLogs<T> {
    pub l: usize,
    /// Indexed by [`F00`], [`F0H`], [`FH0`], [`FHH`].
    pub fermion: [LogMag<T>; 4],
    /// Indexed by [`PP`], [`PA`], [`AP`], [`AA`].
    pub spin: [LogMag<T>; 4],
}

/// Lattice dispersion `ω(k) = asinh √(sin²k + 2 sinh²μ)`.
pub fn dispersion<T: Real>(k: T, mu: T) -> T {
    let s = k.sin();
    let m = mu.sinh();
    (s * s + T::lit(2.0) * m * m).sqrt().asinh()
}

fn omega_m2<T: Real>(k: T, m2: T) -> T {
    let s = k.sin();
    (s * s + m2).sqrt().asinh()
}

fn omega_complex<T: Real>(z: Complex<T>, m2: T) -> Complex<T> {
    let s = z.sin();
    (s * s + Complex::new(m2, T::zero())).sqrt().asinh()
}

fn momentum<T: Real>(n: usize, half: bool, l: usize) -> T {
    let shift = if half { T::lit(0.5) } else { T::zero() };
    T::PI() * (T::from_usize_lossy(n) + shift) / T::from_usize_lossy(l)
}

/// `log(2 sinh a)` or `log(2 cosh a)` for `a > 0`.
fn mode_log<T: Real>(a: T, gamma_half: bool) -> T {
    let e = (-(a + a)).exp();
    if gamma_half {
        a + e.ln_1p()
    } else {
        a + (-e).ln_1p()
    }
}

/// Log partition function of the fermion sector `(α, γ)`.
fn fermion_log<T: Real>(point: &ModelPoint<T>, l: usize, alpha_half: bool, gamma_half: bool) -> LogMag<T> {
    let m2 = point.mass_sq();
    let lt = T::from_usize_lossy(l);
    let mut acc = CompensatedSum::new();
    let mut zero = false;
    for n in 0..l {
        let a = lt * omega_m2(momentum::<T>(n, alpha_half, l), m2);
        if a == T::zero() {
            if gamma_half {
                acc.add(T::LN_2());
            } else {
                zero = true;
            }
            continue;
        }
        acc.add(mode_log(a, gamma_half));
    }
    if zero {
        LogMag::zero()
    } else {
        LogMag::value(acc.value())
    }
}

/// Fermion-sector log ratios `δ_x = log Z_x − log Z_00` for `x ∈ {0½, ½0, ½½}`,
/// stored as `δ_x = tilde[x]·e^{−scale}`.
#[derive(Debug, Clone, Copy)]
struct Deltas<T> {
    scale: T,
    tilde: [T; 3],
}

impl<T: Real> Deltas<T> {
    fn delta(&self, i: usize) -> T {
        self.tilde[i] * (-self.scale).exp()
    }

    /// `expm1(δ_i)` in scaled form: returns `expm1(δ_i)·e^{scale}`.
    fn expm1_scaled(&self, i: usize) -> T {
        let d = self.delta(i);
        let ratio = if d.abs() < T::lit(1e-12) {
            T::one() + d / T::lit(2.0)
        } else {
            d.exp_m1() / d
        };
        self.tilde[i] * ratio
    }
}

fn atanh_over<T: Real>(y: T) -> T {
    if y < T::lit(1e-8) {
        T::one() + y * y / T::lit(3.0)
    } else {
        y.atanh() / y
    }
}

/// `−ln(1 − y)/y`.
fn neg_ln1m_over<T: Real>(y: T) -> T {
    if y < T::lit(1e-8) {
        T::one() + y / T::lit(2.0)
    } else {
        -(-y).ln_1p() / y
    }
}

/// `ln(1 + y)/y`.
fn ln1p_over<T: Real>(y: T) -> T {
    if y < T::lit(1e-8) {
        T::one() - y / T::lit(2.0)
    } else {
        y.ln_1p() / y
    }
}

/// Fourier coefficient `c_m` of the π-periodic dispersion, times `e^{scale}`.
///
/// The coefficient is evaluated on the contour `Im k = −Y` just below the branch
/// point at `k = iκ`, where the trapezoid rule converges like `e^{−2N(κ−Y)}`.
fn fourier_coeff_scaled<T: Real>(m: usize, kappa: T, m2: T, scale: T) -> T {
    let mt = T::from_usize_lossy(m);
    let y = kappa - T::one() / mt;
    let n = (20 * m).max(64);
    let nt = T::from_usize_lossy(n);
    let two_m = mt + mt;
    let mut acc = CompensatedSum::new();
    for j in 0..n {
        let t = T::PI() * T::from_usize_lossy(j) / nt;
        let w = omega_complex(Complex::new(t, -y), m2);
        let phase = Complex::new(T::zero(), -(two_m * t)).exp();
        acc.add((w * phase).re);
    }
    acc.value() / nt * (scale - two_m * y).exp()
}

fn compute_deltas<T: Real>(point: &ModelPoint<T>, l: usize) -> Deltas<T> {
    let m2 = point.mass_sq();
    if !m2.is_finite() {
        return Deltas { scale: T::zero(), tilde: [T::zero(); 3] };
    }
    let lt = T::from_usize_lossy(l);
    let two = T::lit(2.0);
    let kappa = point.kappa();
    let scale = two * kappa * lt;
    let tail = scale >= T::lit(TAIL_SWITCH);

    let mut d0h = CompensatedSum::new();
    let mut zero_minus = CompensatedSum::new();
    let mut half_minus = CompensatedSum::new();
    let mut half_plus = CompensatedSum::new();
    let mut width = CompensatedSum::new();
    for n in 0..l {
        let w0 = omega_m2(momentum::<T>(n, false, l), m2);
        let wh = omega_m2(momentum::<T>(n, true, l), m2);
        let y0 = (-two * lt * w0).exp();
        let yh = (-two * lt * wh).exp();
        // Relative weights e^{−2L(ω−κ)} carry the common e^{−2κL} factor out.
        let (e0, eh) = if tail {
            ((-two * lt * (w0 - kappa)).exp(), (-two * lt * (wh - kappa)).exp())
        } else {
            (y0, yh)
        };
        d0h.add(two * e0 * atanh_over(y0));
        zero_minus.add(-e0 * neg_ln1m_over(y0));
        half_minus.add(-eh * neg_ln1m_over(yh));
        half_plus.add(eh * ln1p_over(yh));
        if !tail {
            width.add(wh - w0);
        }
    }
    // L·Σ_n [ω(π(n+½)/L) − ω(πn/L)] = −4L² Σ_{j odd} c_{jL}.
    let l_dw = if tail {
        let mut acc = CompensatedSum::new();
        let mut j = 1usize;
        loop {
            let damping = scale * T::from_usize_lossy(j - 1);
            if j > 1 && damping > T::lit(45.0) {
                break;
            }
            let c = fourier_coeff_scaled(j * l, kappa, m2, scale);
            acc.add(-T::lit(4.0) * lt * lt * c);
            j += 2;
        }
        acc.value()
    } else {
        lt * width.value()
    };
    let dh0 = half_minus.value() - zero_minus.value() + l_dw;
    let dhh = half_plus.value() - zero_minus.value() + l_dw;
    Deltas {
        scale: if tail { scale } else { T::zero() },
        tilde: [d0h.value(), dh0, dhh],
    }
}

fn check_l(l: usize) -> Result<()> {
    if l < 2 {
        return domain(format!("L = {l} must be at least 2"));
    }
    Ok(())
}

/// Log partition functions of all fermion and spin sectors.
pub fn fermion_sector_logs<T: Real>(point: &ModelPoint<T>, l: usize) -> Result<SectorLogs<T>> {
    check_l(l)?;
    let fermion = [
        fermion_log(point, l, false, false),
        fermion_log(point, l, false, true),
        fermion_log(point, l, true, false),
        fermion_log(point, l, true, true),
    ];
    let spin = spin_logs(point, l, &fermion);
    Ok(SectorLogs { l, fermion, spin })
}

fn spin_logs<T: Real>(point: &ModelPoint<T>, l: usize, fermion: &[LogMag<T>; 4]) -> [LogMag<T>; 4] {
    let half_log = T::LN_2();
    // Spin sector = ½ Σ_x sign·Z_x over (½½, 0½, ½0, 00), the last weighted by the temperature side.
    let signs: [[T; 3]; 4] = {
        let (p, m) = (T::one(), -T::one());
        [[p, p, p], [p, p, m], [p, m, p], [m, p, p]]
    };
    let d00 = [-T::one(), T::one(), T::one(), T::one()];
    if point.temp_side == 0 || fermion[F00].is_zero {
        let logs = [fermion[FHH].log, fermion[F0H].log, fermion[FH0].log];
        let m = logs.iter().copied().fold(T::neg_infinity(), T::max);
        let mut out = [LogMag::zero(); 4];
        for (k, sg) in signs.iter().enumerate() {
            let v = (0..3).fold(T::zero(), |acc, i| acc + sg[i] * (logs[i] - m).exp());
            if v > T::zero() {
                out[k] = LogMag::value(m + v.ln() - half_log);
            }
        }
        return out;
    }
    let s = T::from_i8(point.temp_side).unwrap();
    let dl = compute_deltas(point, l);
    // Scaled expm1 of (δ_½½, δ_0½, δ_½0).
    let e = [dl.expm1_scaled(2), dl.expm1_scaled(0), dl.expm1_scaled(1)];
    let l00 = fermion[F00].log;
    let mut out = [LogMag::zero(); 4];
    for (k, sg) in signs.iter().enumerate() {
        // Σ sign·e^{δ} + s·d00 = (Σ sign + s·d00) + Σ sign·expm1(δ).
        let constant = sg.iter().fold(T::zero(), |a, &x| a + x) + s * d00[k];
        let var = (0..3).fold(T::zero(), |acc, i| acc + sg[i] * e[i]);
        let (v, shift) = if constant == T::zero() {
            (var, dl.scale)
        } else {
            (constant + var * (-dl.scale).exp(), T::zero())
        };
        if v > T::zero() {
            out[k] = LogMag::value(l00 + v.ln() - shift - half_log);
        }
    }
    out
}

fn check_p<T: Real>(p: T) -> Result<ModelPoint<T>> {
    nishimori_point(p)
}

/// Exact failure probability of the post-selected toric code, `L × L` torus.
pub fn pfail_exact<T: Real>(p: T, l: usize) -> Result<T> {
    check_l(l)?;
    let point = check_p(p)?;
    Ok(pfail_from_point(&point, l))
}

/// Natural log of [`pfail_exact`], accurate far below threshold where the
/// probability itself underflows.
pub fn log_pfail_exact<T: Real>(p: T, l: usize) -> Result<T> {
    check_l(l)?;
    let point = check_p(p)?;
    if point.temp_side >= 0 {
        return Ok(pfail_from_point(&point, l).ln());
    }
    let dl = compute_deltas(&point, l);
    let s_tilde = dl.expm1_scaled(0) + dl.expm1_scaled(1) + dl.expm1_scaled(2);
    let s = s_tilde * (-dl.scale).exp();
    let two = T::lit(2.0);
    Ok(s_tilde.ln() - dl.scale - two.ln() - (two + s).ln())
}

fn pfail_from_point<T: Real>(point: &ModelPoint<T>, l: usize) -> T {
    let half = T::lit(0.5);
    match point.temp_side {
        0 => half,
        side => {
            let dl = compute_deltas(point, l);
            let s = (dl.expm1_scaled(0) + dl.expm1_scaled(1) + dl.expm1_scaled(2)) * (-dl.scale).exp();
            let two = T::lit(2.0);
            if side > 0 {
                half + T::one() / (T::lit(4.0) + s)
            } else {
                s / (two * (two + s))
            }
        }
    }
}

/// Reference evaluation `½ + s·r` straight from the four fermion log sums,
/// without the tail rewriting. Loses relative accuracy far below threshold.
pub fn pfail_direct<T: Real>(p: T, l: usize) -> Result<T> {
    let point = check_p(p)?;
    let logs = fermion_sector_logs(&point, l)?;
    let f = &logs.fermion;
    if point.temp_side == 0 || f[F00].is_zero {
        return Ok(T::lit(0.5));
    }
    let s = T::from_i8(point.temp_side).unwrap();
    let m = f.iter().map(|x| x.log).fold(T::neg_infinity(), T::max);
    let e = |i: usize| (f[i].log - m).exp();
    let r = e(F00) / (e(FHH) + e(F0H) + e(FH0) + s * e(F00));
    Ok(T::lit(0.5) + s * r)
}
