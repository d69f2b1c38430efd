//! Color-difference formulas and a registry that evaluates them by id on
//! 8-bit sRGB inputs.

use std::f64::consts::PI;

use crate::color::{convert_srgb, Color, ColorSpaceTag, Hsl, Hsv, Lab, Luv, Srgb8, WhitePoint};
use crate::error::{ColorError, Result};

/// Parametric factors k_L, k_C, k_H of CIEDE2000.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Ciede2000Params {
    pub k_l: f64,
    pub k_c: f64,
    pub k_h: f64,
}

impl Default for Ciede2000Params {
    fn default() -> Self {
        Ciede2000Params { k_l: 1.0, k_c: 1.0, k_h: 1.0 }
    }
}

/// Intermediate terms of a CIEDE2000 evaluation.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Ciede2000Terms {
    pub c1_prime: f64,
    pub c2_prime: f64,
    pub h1_prime: f64,
    pub h2_prime: f64,
    pub dl_prime: f64,
    pub dc_prime: f64,
    pub dh_prime: f64,
    pub r_t: f64,
    pub s_l: f64,
    pub s_c: f64,
    pub s_h: f64,
}

/// Lightness:chroma ratio of CMC(l:c).
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CmcParams {
    pub l: f64,
    pub c: f64,
}

impl Default for CmcParams {
    fn default() -> Self {
        CmcParams { l: 1.0, c: 1.0 }
    }
}

fn chroma(a: f64, b: f64) -> f64 {
    a.hypot(b)
}

/// Hue angle in degrees within `[0, 360)`; zero for the achromatic point.
fn hue_deg(a: f64, b: f64) -> f64 {
    if a == 0.0 && b == 0.0 {
        return 0.0;
    }
    let h = b.atan2(a).to_degrees();
    if h < 0.0 {
        h + 360.0
    } else {
        h
    }
}

/// CIE 1976 ΔE\*ab.
pub fn delta_e76(a: &Lab, b: &Lab) -> f64 {
    ((a.l - b.l).powi(2) + (a.a - b.a).powi(2) + (a.b - b.b).powi(2)).sqrt()
}

const POW25_7: f64 = 6_103_515_625.0;

/// Evaluates the CIEDE2000 intermediates for a pair.
pub fn ciede2000_terms(x: &Lab, y: &Lab) -> Ciede2000Terms {
    let c_mean = (chroma(x.a, x.b) + chroma(y.a, y.b)) / 2.0;
    let c_mean7 = c_mean.powi(7);
    let g = 0.5 * (1.0 - (c_mean7 / (c_mean7 + POW25_7)).sqrt());
    let a1 = (1.0 + g) * x.a;
    let a2 = (1.0 + g) * y.a;
    let c1 = chroma(a1, x.b);
    let c2 = chroma(a2, y.b);
    let h1 = hue_deg(a1, x.b);
    let h2 = hue_deg(a2, y.b);

    let dl = y.l - x.l;
    let dc = c2 - c1;
    let chroma_product = c1 * c2;
    let dh_angle = if chroma_product == 0.0 {
        0.0
    } else {
        let d = h2 - h1;
        if d > 180.0 {
            d - 360.0
        } else if d < -180.0 {
            d + 360.0
        } else {
            d
        }
    };
    let dh = 2.0 * chroma_product.sqrt() * (dh_angle.to_radians() / 2.0).sin();

    let l_mean = (x.l + y.l) / 2.0;
    let c_mean_prime = (c1 + c2) / 2.0;
    let h_mean = if chroma_product == 0.0 {
        h1 + h2
    } else if (h1 - h2).abs() <= 180.0 {
        (h1 + h2) / 2.0
    } else if h1 + h2 < 360.0 {
        (h1 + h2 + 360.0) / 2.0
    } else {
        (h1 + h2 - 360.0) / 2.0
    };

    let t = 1.0 - 0.17 * (h_mean - 30.0).to_radians().cos()
        + 0.24 * (2.0 * h_mean).to_radians().cos()
        + 0.32 * (3.0 * h_mean + 6.0).to_radians().cos()
        - 0.20 * (4.0 * h_mean - 63.0).to_radians().cos();
    let d_theta = 30.0 * (-((h_mean - 275.0) / 25.0).powi(2)).exp();
    let c_mean_prime7 = c_mean_prime.powi(7);
    let r_c = 2.0 * (c_mean_prime7 / (c_mean_prime7 + POW25_7)).sqrt();
    let l50 = (l_mean - 50.0).powi(2);

    Ciede2000Terms {
        c1_prime: c1,
        c2_prime: c2,
        h1_prime: h1,
        h2_prime: h2,
        dl_prime: dl,
        dc_prime: dc,
        dh_prime: dh,
        r_t: -(2.0 * d_theta).to_radians().sin() * r_c,
        s_l: 1.0 + 0.015 * l50 / (20.0 + l50).sqrt(),
        s_c: 1.0 + 0.045 * c_mean_prime,
        s_h: 1.0 + 0.015 * c_mean_prime * t,
    }
}

/// CIEDE2000 color difference.
pub fn delta_e2000(a: &Lab, b: &Lab, p: &Ciede2000Params) -> f64 {
    let t = ciede2000_terms(a, b);
    let l = t.dl_prime / (p.k_l * t.s_l);
    let c = t.dc_prime / (p.k_c * t.s_c);
    let h = t.dh_prime / (p.k_h * t.s_h);
    (l * l + c * c + h * h + t.r_t * c * h).max(0.0).sqrt()
}

/// Squared ΔH\*ab recovered from the Cartesian differences.
fn delta_h_squared(a: &Lab, b: &Lab, dc: f64) -> f64 {
    ((a.a - b.a).powi(2) + (a.b - b.b).powi(2) - dc * dc).max(0.0)
}

/// CIE94 with graphic-arts constants. `reference` weights the chroma terms,
/// so the formula is order-dependent.
pub fn delta_e94(reference: &Lab, sample: &Lab) -> f64 {
    let c1 = chroma(reference.a, reference.b);
    let c2 = chroma(sample.a, sample.b);
    let dl = reference.l - sample.l;
    let dc = c1 - c2;
    let dh2 = delta_h_squared(reference, sample, dc);
    let s_c = 1.0 + 0.045 * c1;
    let s_h = 1.0 + 0.015 * c1;
    (dl * dl + (dc / s_c).powi(2) + dh2 / (s_h * s_h)).sqrt()
}

struct CmcWeights {
    s_l: f64,
    s_c: f64,
    s_h: f64,
}

fn cmc_weights(l: f64, c: f64, h_deg: f64) -> CmcWeights {
    let s_l = if l < 16.0 { 0.511 } else { 0.040975 * l / (1.0 + 0.01765 * l) };
    let s_c = 0.0638 * c / (1.0 + 0.0131 * c) + 0.638;
    let c4 = c.powi(4);
    let f = (c4 / (c4 + 1900.0)).sqrt();
    let t = if (164.0..=345.0).contains(&h_deg) {
        0.56 + (0.2 * (h_deg + 168.0).to_radians().cos()).abs()
    } else {
        0.36 + (0.4 * (h_deg + 35.0).to_radians().cos()).abs()
    };
    CmcWeights { s_l, s_c, s_h: s_c * (f * t + 1.0 - f) }
}

/// CMC(l:c) of `sample` against `reference`.
pub fn delta_cmc(reference: &Lab, sample: &Lab, p: &CmcParams) -> f64 {
    let c1 = chroma(reference.a, reference.b);
    let c2 = chroma(sample.a, sample.b);
    let dc = c1 - c2;
    let dl = reference.l - sample.l;
    let dh2 = delta_h_squared(reference, sample, dc);
    let w = cmc_weights(reference.l, c1, hue_deg(reference.a, reference.b));
    ((dl / (p.l * w.s_l)).powi(2) + (dc / (p.c * w.s_c)).powi(2) + dh2 / (w.s_h * w.s_h)).sqrt()
}

/// CMC-style weighting applied to the L\*C\*h(uv) cylinder. Not a standard
/// formula; offered as an alternative reading of "CMC in Luv".
pub fn delta_cmc_luv(reference: &Luv, sample: &Luv, p: &CmcParams) -> f64 {
    let as_lab = |c: &Luv| Lab { l: c.l, a: c.u, b: c.v };
    delta_cmc(&as_lab(reference), &as_lab(sample), p)
}

/// Euclidean ΔE\*uv.
pub fn delta_e_luv(a: &Luv, b: &Luv) -> f64 {
    ((a.l - b.l).powi(2) + (a.u - b.u).powi(2) + (a.v - b.v).powi(2)).sqrt()
}

pub fn euclidean_rgb(a: &Srgb8, b: &Srgb8) -> f64 {
    let d = |x: u8, y: u8| (x as f64 - y as f64).powi(2);
    (d(a.r, b.r) + d(a.g, b.g) + d(a.b, b.b)).sqrt()
}

/// "Redmean" weighted RGB distance.
pub fn weighted_rgb(a: &Srgb8, b: &Srgb8) -> f64 {
    let r_mean = (a.r as f64 + b.r as f64) / 2.0;
    let dr = a.r as f64 - b.r as f64;
    let dg = a.g as f64 - b.g as f64;
    let db = a.b as f64 - b.b as f64;
    ((2.0 + r_mean / 256.0) * dr * dr + 4.0 * dg * dg + (2.0 + (255.0 - r_mean) / 256.0) * db * db).sqrt()
}

/// An HSV or HSL value for cylindrical distances.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Cylindrical {
    Hsv(Hsv),
    Hsl(Hsl),
}

impl Cylindrical {
    fn embed(&self) -> [f64; 3] {
        let (h, s, z) = match *self {
            Cylindrical::Hsv(c) => (c.h, c.s, c.v),
            Cylindrical::Hsl(c) => (c.h, c.s, c.l),
        };
        let rad = h * PI / 180.0;
        [s * rad.cos(), s * rad.sin(), z]
    }
}

/// Distance between two points of the HSV or HSL cylinder, embedded as
/// `(s·cos h, s·sin h, v|l)` with all channels in `[0, 1]`.
pub fn cylindrical_distance(a: &Cylindrical, b: &Cylindrical) -> Result<f64> {
    if std::mem::discriminant(a) != std::mem::discriminant(b) {
        return Err(ColorError::Usage("cylindrical distance between HSV and HSL values".into()));
    }
    let (p, q) = (a.embed(), b.embed());
    Ok(((p[0] - q[0]).powi(2) + (p[1] - q[1]).powi(2) + (p[2] - q[2]).powi(2)).sqrt())
}

/// Which formula a registry entry evaluates.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Formula {
    EuclideanRgb,
    WeightedRgb,
    Cie76,
    Cie94,
    Ciede2000(Ciede2000Params),
    Cmc(CmcParams),
    HsvCylindrical,
    HslCylindrical,
    /// Euclidean distance on XYZ scaled so that white has Y = 100.
    XyzEuclidean,
    Luv(LuvVariant),
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum LuvVariant {
    Euclidean,
    Cmc(CmcParams),
}

#[derive(Debug, Clone, PartialEq)]
pub struct MetricDescriptor {
    pub id: String,
    pub working_space: ColorSpaceTag,
    pub formula: Formula,
    pub symmetric: bool,
}

impl MetricDescriptor {
    pub fn new(id: &str, formula: Formula) -> Self {
        let (working_space, symmetric) = match formula {
            Formula::EuclideanRgb | Formula::WeightedRgb => (ColorSpaceTag::Srgb8, true),
            Formula::Cie76 | Formula::Ciede2000(_) => (ColorSpaceTag::Lab, true),
            Formula::Cie94 | Formula::Cmc(_) => (ColorSpaceTag::Lab, false),
            Formula::HsvCylindrical => (ColorSpaceTag::Hsv, true),
            Formula::HslCylindrical => (ColorSpaceTag::Hsl, true),
            Formula::XyzEuclidean => (ColorSpaceTag::Xyz, true),
            Formula::Luv(LuvVariant::Euclidean) => (ColorSpaceTag::Luv, true),
            Formula::Luv(LuvVariant::Cmc(_)) => (ColorSpaceTag::Luv, false),
        };
        MetricDescriptor { id: id.to_string(), working_space, formula, symmetric }
    }

    /// Distance between two colors already expressed in `working_space`.
    pub fn distance(&self, a: &Color, b: &Color) -> Result<f64> {
        let mismatch = || {
            ColorError::Usage(format!(
                "metric `{}` expects {} inputs, got {} and {}",
                self.id,
                self.working_space,
                a.tag(),
                b.tag()
            ))
        };
        Ok(match (self.formula, a, b) {
            (Formula::EuclideanRgb, Color::Srgb8(x), Color::Srgb8(y)) => euclidean_rgb(x, y),
            (Formula::WeightedRgb, Color::Srgb8(x), Color::Srgb8(y)) => weighted_rgb(x, y),
            (Formula::Cie76, Color::Lab(x), Color::Lab(y)) => delta_e76(x, y),
            (Formula::Cie94, Color::Lab(x), Color::Lab(y)) => delta_e94(x, y),
            (Formula::Ciede2000(p), Color::Lab(x), Color::Lab(y)) => delta_e2000(x, y, &p),
            (Formula::Cmc(p), Color::Lab(x), Color::Lab(y)) => delta_cmc(x, y, &p),
            (Formula::HsvCylindrical, Color::Hsv(x), Color::Hsv(y)) => {
                cylindrical_distance(&Cylindrical::Hsv(*x), &Cylindrical::Hsv(*y))?
            }
            (Formula::HslCylindrical, Color::Hsl(x), Color::Hsl(y)) => {
                cylindrical_distance(&Cylindrical::Hsl(*x), &Cylindrical::Hsl(*y))?
            }
            (Formula::XyzEuclidean, Color::Xyz(x), Color::Xyz(y)) => {
                100.0 * ((x.x - y.x).powi(2) + (x.y - y.y).powi(2) + (x.z - y.z).powi(2)).sqrt()
            }
            (Formula::Luv(LuvVariant::Euclidean), Color::Luv(x), Color::Luv(y)) => delta_e_luv(x, y),
            (Formula::Luv(LuvVariant::Cmc(p)), Color::Luv(x), Color::Luv(y)) => delta_cmc_luv(x, y, &p),
            _ => return Err(mismatch()),
        })
    }
}

/// An immutable set of metrics addressable by id.
#[derive(Debug, Clone)]
pub struct Registry {
    metrics: Vec<MetricDescriptor>,
}

/// Ids of the eight metrics compared against human judgments.
pub const TABLE_METRICS: [&str; 8] =
    ["euclid_rgb", "w_rgb", "lab_cie2000", "lab_cmc", "hsv_cyl", "hsl_cyl", "xyz_euclid", "luv_dist"];

impl Default for Registry {
    fn default() -> Self {
        let entries = [
            ("euclid_rgb", Formula::EuclideanRgb),
            ("w_rgb", Formula::WeightedRgb),
            ("lab_cie2000", Formula::Ciede2000(Ciede2000Params::default())),
            ("lab_cmc", Formula::Cmc(CmcParams::default())),
            ("hsv_cyl", Formula::HsvCylindrical),
            ("hsl_cyl", Formula::HslCylindrical),
            ("xyz_euclid", Formula::XyzEuclidean),
            ("luv_dist", Formula::Luv(LuvVariant::Euclidean)),
            ("cie76", Formula::Cie76),
            ("cie94", Formula::Cie94),
        ];
        Registry { metrics: entries.iter().map(|&(id, f)| MetricDescriptor::new(id, f)).collect() }
    }
}

impl Registry {
    pub fn new() -> Self {
        Self::default()
    }

    /// Adds a metric. Fails if the id is already taken.
    pub fn with(mut self, desc: MetricDescriptor) -> Result<Self> {
        if self.metrics.iter().any(|m| m.id == desc.id) {
            return Err(ColorError::Usage(format!("metric `{}` already registered", desc.id)));
        }
        self.metrics.push(desc);
        Ok(self)
    }

    pub fn ids(&self) -> impl Iterator<Item = &str> {
        self.metrics.iter().map(|m| m.id.as_str())
    }

    pub fn lookup(&self, id: &str) -> Result<&MetricDescriptor> {
        self.metrics.iter().find(|m| m.id == id).ok_or_else(|| ColorError::UnknownMetric {
            id: id.to_string(),
            available: self.ids().collect::<Vec<_>>().join(", "),
        })
    }

    /// Evaluates metric `id` on two 8-bit colors.
    pub fn evaluate_id(&self, id: &str, a: Srgb8, b: Srgb8, wp: &WhitePoint) -> Result<f64> {
        evaluate(self.lookup(id)?, a, b, wp)
    }
}

/// Converts both inputs into the metric's working space and evaluates it.
pub fn evaluate(desc: &MetricDescriptor, a: Srgb8, b: Srgb8, wp: &WhitePoint) -> Result<f64> {
    let x = convert_srgb(a, desc.working_space, wp)?;
    let y = convert_srgb(b, desc.working_space, wp)?;
    desc.distance(&x, &y)
}
