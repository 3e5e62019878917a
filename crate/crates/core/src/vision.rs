//! Eccentricity-dependent perceptual models: cone density, the generalized
//! Gaussian falloff for quantization and spatial-resolution tolerance, and the
//! normalization conventions tying quantization stepsize, QP and resolution
//! together.

use crate::error::{Error, Result};

/// Half-width of the rendered field of view, degrees of one-side eccentricity.
pub const FOV_HALF_WIDTH_DEG: f64 = 55.0;

/// Finest quantization stepsize considered perceptually transparent (QP 22).
pub const Q_MIN: f64 = 8.0;

/// Coarsest quantization stepsize (QP 51).
pub const Q_MAX: f64 = 228.0;

/// Lower clamp for normalized model outputs.
pub const NORM_EPSILON: f64 = 1e-6;

/// QP ladder used for subjective quality scales and tile transcoding.
pub const DEFAULT_QP_LADDER: [u8; 10] = [22, 25, 28, 31, 34, 37, 40, 43, 46, 49];

/// Native reference resolution for normalized spatial resolution.
pub const S_MAX_DEFAULT: SpatialRes = SpatialRes {
    width: 4096,
    height: 2160,
};

/// One-side horizontal eccentricity from the gaze center, in degrees.
///
/// Always finite and non-negative. Planner-facing values are additionally
/// clamped to the field-of-view half width.
#[derive(Clone, Copy, Debug, PartialEq, PartialOrd)]
pub struct EccentricityDeg(f64);

impl EccentricityDeg {
    pub fn new(deg: f64) -> Result<Self> {
        if !deg.is_finite() || deg < 0.0 {
            return Err(Error::Domain(format!(
                "eccentricity must be finite and >= 0, got {deg}"
            )));
        }
        Ok(EccentricityDeg(deg))
    }

    /// Clamps an arbitrary angle into `[0, FOV_HALF_WIDTH_DEG]`.
    pub fn clamped(deg: f64) -> Self {
        EccentricityDeg(deg.clamp(0.0, FOV_HALF_WIDTH_DEG))
    }

    pub fn deg(self) -> f64 {
        self.0
    }
}

/// The three vision areas of the rendered field of view, by one-side
/// eccentricity: central `[0, 9]`, near peripheral `(9, 30]`, far peripheral
/// `(30, 55]`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum VisionZone {
    Cva,
    Npa,
    Fpa,
}

impl VisionZone {
    /// Zone containing `theta`. Upper boundaries are closed: 9 degrees is
    /// still central, 30 degrees is still near peripheral.
    pub fn classify(theta: EccentricityDeg) -> VisionZone {
        let t = theta.deg();
        if t <= 9.0 {
            VisionZone::Cva
        } else if t <= 30.0 {
            VisionZone::Npa
        } else {
            VisionZone::Fpa
        }
    }

    pub fn name(self) -> &'static str {
        match self {
            VisionZone::Cva => "CVA",
            VisionZone::Npa => "NPA",
            VisionZone::Fpa => "FPA",
        }
    }

    pub fn parse(s: &str) -> Result<VisionZone> {
        match s.trim().to_ascii_uppercase().as_str() {
            "CVA" => Ok(VisionZone::Cva),
            "NPA" => Ok(VisionZone::Npa),
            "FPA" => Ok(VisionZone::Fpa),
            other => Err(Error::Parse(format!("unknown vision zone {other:?}"))),
        }
    }
}

/// Which quality control the falloff model describes.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Impact {
    /// Quantization stepsize at native resolution.
    Q,
    /// Spatial resolution at transparent quantization.
    S,
    /// Quantization, resolution-independent (valid at any spatial resolution).
    Joint,
}

impl Impact {
    pub fn parse(s: &str) -> Result<Impact> {
        match s.trim().to_ascii_lowercase().as_str() {
            "q" => Ok(Impact::Q),
            "s" => Ok(Impact::S),
            "joint" => Ok(Impact::Joint),
            other => Err(Error::Parse(format!("unknown impact kind {other:?}"))),
        }
    }

    pub fn name(self) -> &'static str {
        match self {
            Impact::Q => "q",
            Impact::S => "s",
            Impact::Joint => "joint",
        }
    }
}

/// Control parameters of the generalized Gaussian falloff
/// `1/(c*sqrt(2*pi)) * exp(-|(b*theta)^a| / (2*c^2)) + d`.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct GGaussParams {
    /// Shape exponent; governs how fast tolerance decays with eccentricity.
    pub a: f64,
    /// Eccentricity scale, 1/degree.
    pub b: f64,
    /// Width of the Gaussian envelope; sets the peak value.
    pub c: f64,
    /// Asymptotic floor as eccentricity grows without bound.
    pub d: f64,
}

impl GGaussParams {
    pub fn new(a: f64, b: f64, c: f64, d: f64) -> Result<Self> {
        let p = GGaussParams { a, b, c, d };
        p.validate()?;
        Ok(p)
    }

    pub fn validate(&self) -> Result<()> {
        let finite = [self.a, self.b, self.c, self.d]
            .iter()
            .all(|v| v.is_finite());
        if !finite || self.a <= 0.0 || self.b <= 0.0 || self.c <= 0.0 || self.d < 0.0 {
            return Err(Error::Param(format!(
                "falloff parameters require a, b, c > 0 and d >= 0, got {self:?}"
            )));
        }
        Ok(())
    }

    /// Value at zero eccentricity: `1/(c*sqrt(2*pi)) + d`.
    pub fn peak(&self) -> f64 {
        1.0 / (self.c * (2.0 * std::f64::consts::PI).sqrt()) + self.d
    }
}

/// Default parameters for the quantization-impact falloff at native resolution.
pub const Q_FALLOFF: GGaussParams = GGaussParams {
    a: 2.2,
    b: 0.08,
    c: 1.38,
    d: 0.05,
};

/// Default parameters for the resolution-independent (joint) quantization falloff.
pub const JOINT_Q_FALLOFF: GGaussParams = GGaussParams {
    a: 2.2,
    b: 0.055,
    c: 1.1,
    d: 0.06,
};

/// Fixed parameters of the resolution-impact falloff; `c` is content dependent.
pub const S_FALLOFF_A: f64 = 2.2;
pub const S_FALLOFF_B: f64 = 0.033;
pub const S_FALLOFF_D: f64 = 0.06;

/// Resolution-impact falloff parameters for a given content width `c`.
pub fn s_falloff(c_content: f64) -> Result<GGaussParams> {
    if !c_content.is_finite() || c_content <= 0.0 {
        return Err(Error::Param(format!(
            "content parameter c must be > 0, got {c_content}"
        )));
    }
    Ok(GGaussParams {
        a: S_FALLOFF_A,
        b: S_FALLOFF_B,
        c: c_content,
        d: S_FALLOFF_D,
    })
}

/// Raw generalized Gaussian falloff, unclamped. Strictly decreasing in theta
/// and bounded below by `p.d`.
pub fn ggauss(theta: EccentricityDeg, p: &GGaussParams) -> f64 {
    let scale = 1.0 / (p.c * (2.0 * std::f64::consts::PI).sqrt());
    let t = (p.b * theta.deg()).powf(p.a).abs();
    scale * (-t / (2.0 * p.c * p.c)).exp() + p.d
}

fn clamp_norm(v: f64) -> f64 {
    v.clamp(NORM_EPSILON, 1.0)
}

/// Normalized quantization tolerance at eccentricity `theta`, in `(0, 1]`.
pub fn q_hat(theta: EccentricityDeg) -> f64 {
    clamp_norm(ggauss(theta, &Q_FALLOFF))
}

/// Normalized resolution tolerance at eccentricity `theta` for content
/// parameter `c_content`, in `(0, 1]`.
pub fn s_hat(theta: EccentricityDeg, c_content: f64) -> Result<f64> {
    let p = s_falloff(c_content)?;
    Ok(clamp_norm(ggauss(theta, &p)))
}

/// Normalized quantization tolerance valid at all spatial resolutions.
pub fn q_hat_joint(theta: EccentricityDeg) -> f64 {
    clamp_norm(ggauss(theta, &JOINT_Q_FALLOFF))
}

/// Cone density model: a power law over `[1, 20]` degrees, then a linear
/// ramp down to 4000 cones/mm^2 at `theta_floor_deg`, constant beyond.
#[derive(Clone, Copy, Debug)]
pub struct ConeDensity {
    pub theta_floor_deg: f64,
}

impl Default for ConeDensity {
    fn default() -> Self {
        ConeDensity {
            theta_floor_deg: FOV_HALF_WIDTH_DEG,
        }
    }
}

/// Peripheral floor of the cone density ramp, cones/mm^2.
pub const CONE_DENSITY_FLOOR: f64 = 4000.0;

impl ConeDensity {
    pub fn eval(&self, theta: EccentricityDeg) -> f64 {
        // The power law is singular at zero; its stated domain starts at 1 degree.
        let t = theta.deg().max(1.0);
        let power = |t: f64| 50_000.0 * (t / 300.0).powf(-2.0 / 3.0);
        if t <= 20.0 {
            power(t)
        } else if t < self.theta_floor_deg {
            let rho20 = power(20.0);
            let frac = (t - 20.0) / (self.theta_floor_deg - 20.0);
            rho20 + frac * (CONE_DENSITY_FLOOR - rho20)
        } else {
            CONE_DENSITY_FLOOR
        }
    }
}

/// Cone density with the default peripheral floor at the field-of-view edge.
pub fn cone_density(theta: EccentricityDeg) -> f64 {
    ConeDensity::default().eval(theta)
}

/// Quantization stepsize with its equivalent quantization parameter,
/// tied by `q = 2^((qp - 4) / 6)`.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct QuantStep {
    q: f64,
}

impl QuantStep {
    pub fn from_q(q: f64) -> Result<Self> {
        if !q.is_finite() || q <= 0.0 {
            return Err(Error::Domain(format!(
                "quantization stepsize must be > 0, got {q}"
            )));
        }
        Ok(QuantStep { q })
    }

    pub fn from_qp(qp: f64) -> Self {
        QuantStep { q: qp_to_q(qp) }
    }

    pub fn q(self) -> f64 {
        self.q
    }

    pub fn qp(self) -> f64 {
        q_to_qp(self.q)
    }

    /// Largest ladder QP whose stepsize does not exceed this one; `None` when
    /// even the finest ladder entry is coarser.
    pub fn floor_to_ladder(self, ladder: &[u8]) -> Option<u8> {
        ladder
            .iter()
            .copied()
            .filter(|&qp| qp_to_q(qp as f64) <= self.q + 1e-9)
            .max()
    }
}

pub fn qp_to_q(qp: f64) -> f64 {
    ((qp - 4.0) / 6.0).exp2()
}

pub fn q_to_qp(q: f64) -> f64 {
    4.0 + 6.0 * q.log2()
}

/// `q_hat = q_min / q`; requires `q >= q_min`.
pub fn normalize_q(q: QuantStep) -> Result<f64> {
    if q.q() < Q_MIN {
        return Err(Error::Domain(format!(
            "stepsize {} is finer than q_min = {Q_MIN}",
            q.q()
        )));
    }
    Ok(Q_MIN / q.q())
}

/// Inverse of [`normalize_q`]: the stepsize whose normalized value is `q_hat`.
pub fn denormalize_q(q_hat: f64) -> Result<QuantStep> {
    if !q_hat.is_finite() || q_hat <= 0.0 || q_hat > 1.0 {
        return Err(Error::Domain(format!(
            "normalized quantization must lie in (0, 1], got {q_hat}"
        )));
    }
    QuantStep::from_q(Q_MIN / q_hat)
}

/// A spatial resolution in pixels.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub struct SpatialRes {
    pub width: u32,
    pub height: u32,
}

impl SpatialRes {
    pub fn new(width: u32, height: u32) -> Result<Self> {
        if width == 0 || height == 0 {
            return Err(Error::Param(format!(
                "resolution dimensions must be >= 1, got {width}x{height}"
            )));
        }
        Ok(SpatialRes { width, height })
    }

    pub fn pixels(self) -> u64 {
        self.width as u64 * self.height as u64
    }

    /// `s_hat = pixels / pixels(s_max)`.
    pub fn normalized(self, s_max: SpatialRes) -> f64 {
        self.pixels() as f64 / s_max.pixels() as f64
    }

    /// Parses `"4096x2160"`.
    pub fn parse(s: &str) -> Result<SpatialRes> {
        let (w, h) = s
            .trim()
            .split_once(['x', 'X'])
            .ok_or_else(|| Error::Parse(format!("expected WxH, got {s:?}")))?;
        let width = w
            .trim()
            .parse()
            .map_err(|_| Error::Parse(format!("bad width in {s:?}")))?;
        let height = h
            .trim()
            .parse()
            .map_err(|_| Error::Parse(format!("bad height in {s:?}")))?;
        SpatialRes::new(width, height)
    }
}

impl std::fmt::Display for SpatialRes {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(f, "{}x{}", self.width, self.height)
    }
}

/// The resolution holding `s_hat` of the pixels of `s_max`, preserving aspect
/// ratio, with dimensions rounded to the nearest even integers.
pub fn denormalize_s(s_hat: f64, s_max: SpatialRes) -> Result<SpatialRes> {
    if !s_hat.is_finite() || s_hat <= 0.0 || s_hat > 1.0 {
        return Err(Error::Domain(format!(
            "normalized resolution must lie in (0, 1], got {s_hat}"
        )));
    }
    let f = s_hat.sqrt();
    let round_even = |v: f64| -> u32 {
        let n = (v / 2.0).round() * 2.0;
        (n as u32).max(2)
    };
    SpatialRes::new(
        round_even(s_max.width as f64 * f),
        round_even(s_max.height as f64 * f),
    )
}

/// Parses a falloff parameter config: one `key value` pair per line, keys
/// `impact` (q | s | joint), `a`, `b`, `c`, `d`. `#` starts a comment.
pub fn parse_falloff_config(text: &str) -> Result<(Impact, GGaussParams)> {
    let mut impact = None;
    let mut vals = [None::<f64>; 4];
    for (lineno, raw) in text.lines().enumerate() {
        let line = raw.split('#').next().unwrap_or("").trim();
        if line.is_empty() {
            continue;
        }
        let (key, value) = line.split_once(char::is_whitespace).ok_or_else(|| {
            Error::Parse(format!("line {}: expected `key value`", lineno + 1))
        })?;
        let value = value.trim();
        match key {
            "impact" => impact = Some(Impact::parse(value)?),
            "a" | "b" | "c" | "d" => {
                let idx = (key.as_bytes()[0] - b'a') as usize;
                let v: f64 = value.parse().map_err(|_| {
                    Error::Parse(format!("line {}: bad number {value:?}", lineno + 1))
                })?;
                vals[idx] = Some(v);
            }
            other => {
                return Err(Error::Parse(format!(
                    "line {}: unknown key {other:?}",
                    lineno + 1
                )))
            }
        }
    }
    let impact = impact.ok_or_else(|| Error::Parse("missing `impact` key".into()))?;
    let req = |i: usize, name: &str| {
        vals[i].ok_or_else(|| Error::Parse(format!("missing `{name}` key")))
    };
    let params = GGaussParams::new(req(0, "a")?, req(1, "b")?, req(2, "c")?, req(3, "d")?)?;
    Ok((impact, params))
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::rngs::StdRng;
    use rand::{Rng, SeedableRng};

    fn ecc(deg: f64) -> EccentricityDeg {
        EccentricityDeg::new(deg).unwrap()
    }

    // Reference values evaluated with 50-digit arithmetic.
    const Q_HAT_0: f64 = 0.33908860898654542;
    const Q_HAT_55: f64 = 0.050310566901943613;
    const Q_JOINT_0: f64 = 0.42267480036493880;
    const S_HAT_0_C09: f64 = 0.50326920044603631;
    const RHO_20: f64 = 304110.09977867001;

    #[test]
    fn cone_density_matches_power_law_then_ramp() {
        assert!((cone_density(ecc(20.0)) - RHO_20).abs() < 1e-6);
        // Below the power-law domain the angle clamps to 1 degree.
        assert_eq!(cone_density(ecc(0.2)), cone_density(ecc(1.0)));
        // Floor at the field-of-view edge and beyond.
        assert_eq!(cone_density(ecc(55.0)), 4000.0);
        assert_eq!(cone_density(ecc(300.0)), 4000.0);
        // Ramp midpoint between the 20-degree value and the floor.
        let mid = cone_density(ecc(37.5));
        assert!((mid - (RHO_20 + 4000.0) / 2.0).abs() < 1e-6);
        // Configurable floor angle.
        let m = ConeDensity {
            theta_floor_deg: 40.0,
        };
        assert_eq!(m.eval(ecc(40.0)), 4000.0);
        assert!(m.eval(ecc(39.0)) > 4000.0);
    }

    #[test]
    fn negative_eccentricity_is_a_domain_error() {
        assert!(EccentricityDeg::new(-0.1).is_err());
        assert!(EccentricityDeg::new(f64::NAN).is_err());
    }

    #[test]
    fn ggauss_peak_and_floor() {
        let p = GGaussParams::new(2.2, 0.08, 1.38, 0.05).unwrap();
        assert!((ggauss(ecc(0.0), &p) - p.peak()).abs() < 1e-12);
        // Far tail approaches d.
        assert!((ggauss(ecc(1e6), &p) - p.d).abs() < 1e-12);
        assert!((q_hat(ecc(0.0)) - Q_HAT_0).abs() < 1e-5);
        assert!((q_hat(ecc(55.0)) - Q_HAT_55).abs() < 1e-5);
        assert!(q_hat(ecc(55.0)) < 0.051);
        assert!((q_hat_joint(ecc(0.0)) - Q_JOINT_0).abs() < 1e-5);
    }

    #[test]
    fn q_hat_is_strictly_decreasing_across_zones() {
        let a = q_hat(ecc(9.0));
        let b = q_hat(ecc(30.0));
        let c = q_hat(ecc(55.0));
        assert!(a > b && b > c);
    }

    #[test]
    fn s_hat_examples_and_clamp() {
        assert!((s_hat(ecc(0.0), 0.9).unwrap() - S_HAT_0_C09).abs() < 1e-5);
        // Small width parameter pushes the raw value above 1; output clamps.
        let raw = ggauss(ecc(0.0), &s_falloff(0.3).unwrap());
        assert!(raw > 1.0);
        assert_eq!(s_hat(ecc(0.0), 0.3).unwrap(), 1.0);
        // Floor d at large eccentricity.
        assert!((s_hat(ecc(1e9), 0.9).unwrap() - S_FALLOFF_D).abs() < 1e-12);
        assert!(s_hat(ecc(0.0), 0.0).is_err());
        assert!(s_hat(ecc(0.0), -1.0).is_err());
    }

    #[test]
    fn joint_falloff_depends_on_theta_alone() {
        // Same curve regardless of any resolution the caller has in mind.
        for t in [0.0, 4.5, 17.0, 55.0] {
            let v1 = q_hat_joint(ecc(t));
            let v2 = q_hat_joint(ecc(t));
            assert_eq!(v1, v2);
        }
        assert!((q_hat_joint(ecc(1e9)) - 0.06).abs() < 1e-12);
    }

    #[test]
    fn falloff_monotone_under_random_params() {
        let mut rng = StdRng::seed_from_u64(0x5eed);
        for _ in 0..500 {
            let p = GGaussParams::new(
                rng.random_range(1.2..3.2),
                rng.random_range(0.02..0.12),
                rng.random_range(0.3..3.0),
                rng.random_range(0.0..0.1),
            )
            .unwrap();
            let t1: f64 = rng.random_range(0.0..55.0);
            let t2: f64 = rng.random_range(0.0..55.0);
            let (lo, hi) = if t1 < t2 { (t1, t2) } else { (t2, t1) };
            if lo == hi {
                continue;
            }
            let v_lo = ggauss(ecc(lo), &p);
            let v_hi = ggauss(ecc(hi), &p);
            assert!(v_lo >= v_hi, "falloff increased: {p:?} {lo} {hi}");
            // Strict as long as the exponential has not underflowed.
            let expo = (p.b * hi).powf(p.a) / (2.0 * p.c * p.c);
            if expo < 700.0 {
                assert!(v_lo > v_hi, "falloff not strict: {p:?} {lo} {hi}");
            }
            assert!(v_hi > p.d);
        }
    }

    #[test]
    fn quantization_normalization_identities() {
        // QP 22 <-> q = 8, exactly.
        assert_eq!(qp_to_q(22.0), 8.0);
        assert_eq!(q_to_qp(8.0), 22.0);
        // q = 64 -> q_hat = 0.125, exactly.
        let q64 = QuantStep::from_q(64.0).unwrap();
        assert_eq!(normalize_q(q64).unwrap(), 0.125);
        // q_hat = 0.05 -> q = 160, QP just short of 48.
        let q = denormalize_q(0.05).unwrap();
        assert_eq!(q.q(), 160.0);
        assert!((q.qp() - 47.931568569324174).abs() < 1e-12);
        // Round trip over (0, 1].
        let mut rng = StdRng::seed_from_u64(7);
        for _ in 0..200 {
            let x: f64 = rng.random_range(1e-3..1.0);
            let rt = normalize_q(denormalize_q(x).unwrap()).unwrap();
            assert!((rt - x).abs() < 1e-12);
        }
        assert!(denormalize_q(0.0).is_err());
        assert!(denormalize_q(-0.5).is_err());
        assert!(denormalize_q(1.5).is_err());
        assert!(normalize_q(QuantStep::from_q(4.0).unwrap()).is_err());
    }

    #[test]
    fn qp_ladder_round_trips_exactly() {
        for qp in DEFAULT_QP_LADDER {
            let q = qp_to_q(qp as f64);
            assert_eq!(q_to_qp(q), qp as f64, "ladder QP {qp}");
        }
    }

    #[test]
    fn spatial_normalization() {
        let s = SpatialRes::new(2048, 1080).unwrap();
        assert_eq!(s.normalized(S_MAX_DEFAULT), 0.25);
        assert_eq!(denormalize_s(1.0, S_MAX_DEFAULT).unwrap(), S_MAX_DEFAULT);
        assert_eq!(
            denormalize_s(0.0625, S_MAX_DEFAULT).unwrap(),
            SpatialRes::new(1024, 540).unwrap()
        );
        assert_eq!(
            denormalize_s(0.25, S_MAX_DEFAULT).unwrap(),
            SpatialRes::new(2048, 1080).unwrap()
        );
        assert!(denormalize_s(0.0, S_MAX_DEFAULT).is_err());
        assert!(denormalize_s(1.1, S_MAX_DEFAULT).is_err());
    }

    #[test]
    fn zone_boundaries_are_closed_above() {
        assert_eq!(VisionZone::classify(ecc(0.0)), VisionZone::Cva);
        assert_eq!(VisionZone::classify(ecc(9.0)), VisionZone::Cva);
        assert_eq!(VisionZone::classify(ecc(9.0001)), VisionZone::Npa);
        assert_eq!(VisionZone::classify(ecc(30.0)), VisionZone::Npa);
        assert_eq!(VisionZone::classify(ecc(30.0001)), VisionZone::Fpa);
        assert_eq!(VisionZone::classify(ecc(55.0)), VisionZone::Fpa);
        // Every angle in [0, 55] lands in exactly one zone by construction.
        for i in 0..=550 {
            let t = i as f64 / 10.0;
            let _ = VisionZone::classify(ecc(t));
        }
    }

    #[test]
    fn falloff_config_parses() {
        let (impact, p) = parse_falloff_config(
            "# quantization impact\nimpact q\na 2.2\nb 0.08\nc 1.38\nd 0.05\n",
        )
        .unwrap();
        assert_eq!(impact, Impact::Q);
        assert_eq!(p, Q_FALLOFF);
        assert!(parse_falloff_config("a 2.2\nb 0.08\nc 1.38\nd 0.05\n").is_err());
        assert!(parse_falloff_config("impact q\na 2.2\nb 0.08\nc 1.38\n").is_err());
        assert!(parse_falloff_config("impact q\nbogus 1\n").is_err());
    }
}
