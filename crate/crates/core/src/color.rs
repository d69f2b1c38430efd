//! Color values tagged by space, and the conversions between them.
//!
//! Every conversion is anchored at a [`WhitePoint`]. RGB input is assumed to be
//! sRGB: gamma-encoded 8-bit channels are decoded to linear light before any
//! tristimulus math. All paths between spaces route through linear RGB and XYZ.

use std::fmt;
use std::str::FromStr;
use std::sync::OnceLock;

use serde::{Deserialize, Serialize};

use crate::error::{ColorError, Result};

/// Gamma-encoded 8-bit sRGB.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Default)]
pub struct Srgb8 {
    pub r: u8,
    pub g: u8,
    pub b: u8,
}

/// Linear-light RGB with sRGB primaries. Values may leave `[0, 1]` in
/// intermediate results; they are clamped only when encoding back to 8 bits.
#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub struct LinearRgb {
    pub r: f64,
    pub g: f64,
    pub b: f64,
}

/// CIE 1931 tristimulus values, scaled so that the reference white has `Y = 1`.
#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub struct Xyz {
    pub x: f64,
    pub y: f64,
    pub z: f64,
}

/// Tristimulus values of a reference white, normalized to `Y = 1`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct WhitePoint {
    pub xn: f64,
    pub yn: f64,
    pub zn: f64,
}

/// CIE 1976 L\*a\*b\*.
#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub struct Lab {
    pub l: f64,
    pub a: f64,
    pub b: f64,
}

/// CIE 1976 L\*u\*v\*.
#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub struct Luv {
    pub l: f64,
    pub u: f64,
    pub v: f64,
}

/// Hue in degrees `[0, 360)`, saturation and value in `[0, 1]`.
#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub struct Hsv {
    pub h: f64,
    pub s: f64,
    pub v: f64,
}

/// Hue in degrees `[0, 360)`, saturation and lightness in `[0, 1]`.
#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub struct Hsl {
    pub h: f64,
    pub s: f64,
    pub l: f64,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ColorSpaceTag {
    Srgb8,
    LinearRgb,
    Xyz,
    Lab,
    Luv,
    Hsv,
    Hsl,
}

impl ColorSpaceTag {
    pub const ALL: [ColorSpaceTag; 7] = [
        ColorSpaceTag::Srgb8,
        ColorSpaceTag::LinearRgb,
        ColorSpaceTag::Xyz,
        ColorSpaceTag::Lab,
        ColorSpaceTag::Luv,
        ColorSpaceTag::Hsv,
        ColorSpaceTag::Hsl,
    ];

    pub fn name(self) -> &'static str {
        match self {
            ColorSpaceTag::Srgb8 => "srgb8",
            ColorSpaceTag::LinearRgb => "linear_rgb",
            ColorSpaceTag::Xyz => "xyz",
            ColorSpaceTag::Lab => "lab",
            ColorSpaceTag::Luv => "luv",
            ColorSpaceTag::Hsv => "hsv",
            ColorSpaceTag::Hsl => "hsl",
        }
    }
}

impl fmt::Display for ColorSpaceTag {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for ColorSpaceTag {
    type Err = ColorError;

    fn from_str(s: &str) -> Result<Self> {
        match s.to_ascii_lowercase().as_str() {
            "srgb8" | "srgb" | "rgb" => Ok(ColorSpaceTag::Srgb8),
            "linear_rgb" | "linear" | "linrgb" => Ok(ColorSpaceTag::LinearRgb),
            "xyz" => Ok(ColorSpaceTag::Xyz),
            "lab" | "cielab" => Ok(ColorSpaceTag::Lab),
            "luv" | "cieluv" => Ok(ColorSpaceTag::Luv),
            "hsv" | "hsb" => Ok(ColorSpaceTag::Hsv),
            "hsl" => Ok(ColorSpaceTag::Hsl),
            _ => Err(ColorError::UnknownSpace(s.to_string())),
        }
    }
}

/// A color value carrying exactly one space tag.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Color {
    Srgb8(Srgb8),
    LinearRgb(LinearRgb),
    Xyz(Xyz),
    Lab(Lab),
    Luv(Luv),
    Hsv(Hsv),
    Hsl(Hsl),
}

impl Color {
    pub fn tag(&self) -> ColorSpaceTag {
        match self {
            Color::Srgb8(_) => ColorSpaceTag::Srgb8,
            Color::LinearRgb(_) => ColorSpaceTag::LinearRgb,
            Color::Xyz(_) => ColorSpaceTag::Xyz,
            Color::Lab(_) => ColorSpaceTag::Lab,
            Color::Luv(_) => ColorSpaceTag::Luv,
            Color::Hsv(_) => ColorSpaceTag::Hsv,
            Color::Hsl(_) => ColorSpaceTag::Hsl,
        }
    }

    /// Channel values in the space's native units (hue in degrees).
    pub fn channels(&self) -> [f64; 3] {
        match *self {
            Color::Srgb8(c) => [c.r as f64, c.g as f64, c.b as f64],
            Color::LinearRgb(c) => [c.r, c.g, c.b],
            Color::Xyz(c) => [c.x, c.y, c.z],
            Color::Lab(c) => [c.l, c.a, c.b],
            Color::Luv(c) => [c.l, c.u, c.v],
            Color::Hsv(c) => [c.h, c.s, c.v],
            Color::Hsl(c) => [c.h, c.s, c.l],
        }
    }

    /// Builds a color from native channel values. 8-bit channels are rounded
    /// and clamped.
    pub fn from_channels(tag: ColorSpaceTag, ch: [f64; 3]) -> Color {
        let [p, q, r] = ch;
        match tag {
            ColorSpaceTag::Srgb8 => Color::Srgb8(Srgb8::new(quantize(p), quantize(q), quantize(r))),
            ColorSpaceTag::LinearRgb => Color::LinearRgb(LinearRgb { r: p, g: q, b: r }),
            ColorSpaceTag::Xyz => Color::Xyz(Xyz { x: p, y: q, z: r }),
            ColorSpaceTag::Lab => Color::Lab(Lab { l: p, a: q, b: r }),
            ColorSpaceTag::Luv => Color::Luv(Luv { l: p, u: q, v: r }),
            ColorSpaceTag::Hsv => Color::Hsv(Hsv { h: p, s: q, v: r }),
            ColorSpaceTag::Hsl => Color::Hsl(Hsl { h: p, s: q, l: r }),
        }
    }
}

fn quantize(x: f64) -> u8 {
    x.round().clamp(0.0, 255.0) as u8
}

impl WhitePoint {
    /// CIE standard illuminant D65, 2° observer, from its xy chromaticity.
    pub const D65: WhitePoint = WhitePoint {
        xn: 0.3127 / 0.3290,
        yn: 1.0,
        zn: (1.0 - 0.3127 - 0.3290) / 0.3290,
    };

    /// White point with chromaticity `(x, y)` and luminance 1.
    pub fn from_chromaticity(x: f64, y: f64) -> Result<Self> {
        if !(x > 0.0 && y > 0.0 && x + y < 1.0) {
            return Err(ColorError::Domain(format!("invalid white chromaticity ({x}, {y})")));
        }
        Ok(WhitePoint { xn: x / y, yn: 1.0, zn: (1.0 - x - y) / y })
    }

    fn as_xyz(&self) -> Xyz {
        Xyz { x: self.xn, y: self.yn, z: self.zn }
    }
}

impl Default for WhitePoint {
    fn default() -> Self {
        WhitePoint::D65
    }
}

impl Srgb8 {
    pub const BLACK: Srgb8 = Srgb8 { r: 0, g: 0, b: 0 };
    pub const WHITE: Srgb8 = Srgb8 { r: 255, g: 255, b: 255 };

    pub const fn new(r: u8, g: u8, b: u8) -> Self {
        Srgb8 { r, g, b }
    }

    pub fn to_hex(self) -> String {
        self.to_string()
    }

    fn unit(self) -> [f64; 3] {
        [self.r as f64 / 255.0, self.g as f64 / 255.0, self.b as f64 / 255.0]
    }
}

impl fmt::Display for Srgb8 {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "#{:02X}{:02X}{:02X}", self.r, self.g, self.b)
    }
}

impl FromStr for Srgb8 {
    type Err = ColorError;

    /// Accepts `#RRGGBB` (any case) or a decimal triple `r,g,b`.
    fn from_str(s: &str) -> Result<Self> {
        let s = s.trim();
        let bad = || ColorError::Parse(s.to_string());
        if let Some(hex) = s.strip_prefix('#') {
            if hex.len() != 6 || !hex.bytes().all(|c| c.is_ascii_hexdigit()) {
                return Err(bad());
            }
            let channel = |i: usize| u8::from_str_radix(&hex[i..i + 2], 16).map_err(|_| bad());
            return Ok(Srgb8::new(channel(0)?, channel(2)?, channel(4)?));
        }
        let parts: Vec<&str> = s.split(',').map(str::trim).collect();
        if parts.len() != 3 {
            return Err(bad());
        }
        let channel = |p: &str| p.parse::<u8>().map_err(|_| bad());
        Ok(Srgb8::new(channel(parts[0])?, channel(parts[1])?, channel(parts[2])?))
    }
}

impl Serialize for Srgb8 {
    fn serialize<S: serde::Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        s.serialize_str(&self.to_string())
    }
}

impl<'de> Deserialize<'de> for Srgb8 {
    fn deserialize<D: serde::Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        let s = String::deserialize(d)?;
        s.parse().map_err(serde::de::Error::custom)
    }
}

// sRGB transfer function.

fn decode_channel(v: f64) -> f64 {
    if v <= 0.04045 {
        v / 12.92
    } else {
        ((v + 0.055) / 1.055).powf(2.4)
    }
}

fn encode_channel(v: f64) -> f64 {
    if v <= 0.0031308 {
        12.92 * v
    } else {
        1.055 * v.powf(1.0 / 2.4) - 0.055
    }
}

pub fn srgb_to_linear(c: Srgb8) -> LinearRgb {
    let [r, g, b] = c.unit();
    LinearRgb { r: decode_channel(r), g: decode_channel(g), b: decode_channel(b) }
}

/// Encodes to 8-bit sRGB, clamping out-of-gamut values.
pub fn linear_to_srgb(c: LinearRgb) -> Srgb8 {
    let [r, g, b] = linear_to_unit(c);
    Srgb8::new(quantize(r * 255.0), quantize(g * 255.0), quantize(b * 255.0))
}

/// Gamma-encoded channels in `[0, 1]` without 8-bit quantization.
fn linear_to_unit(c: LinearRgb) -> [f64; 3] {
    [c.r, c.g, c.b].map(|v| encode_channel(v.clamp(0.0, 1.0)))
}

fn unit_to_linear(u: [f64; 3]) -> LinearRgb {
    let [r, g, b] = u.map(decode_channel);
    LinearRgb { r, g, b }
}

// RGB <-> XYZ.

type Mat3 = [[f64; 3]; 3];

const PRIMARIES: [(f64, f64); 3] = [(0.64, 0.33), (0.30, 0.60), (0.15, 0.06)];

fn mat_mul_vec(m: &Mat3, v: [f64; 3]) -> [f64; 3] {
    [
        m[0][0] * v[0] + m[0][1] * v[1] + m[0][2] * v[2],
        m[1][0] * v[0] + m[1][1] * v[1] + m[1][2] * v[2],
        m[2][0] * v[0] + m[2][1] * v[1] + m[2][2] * v[2],
    ]
}

fn mat_inverse(m: &Mat3) -> Mat3 {
    let det = m[0][0] * (m[1][1] * m[2][2] - m[1][2] * m[2][1])
        - m[0][1] * (m[1][0] * m[2][2] - m[1][2] * m[2][0])
        + m[0][2] * (m[1][0] * m[2][1] - m[1][1] * m[2][0]);
    let c = |r0: usize, c0: usize, r1: usize, c1: usize| m[r0][c0] * m[r1][c1] - m[r0][c1] * m[r1][c0];
    [
        [c(1, 1, 2, 2) / det, -c(0, 1, 2, 2) / det, c(0, 1, 1, 2) / det],
        [-c(1, 0, 2, 2) / det, c(0, 0, 2, 2) / det, -c(0, 0, 1, 2) / det],
        [c(1, 0, 2, 1) / det, -c(0, 0, 2, 1) / det, c(0, 0, 1, 1) / det],
    ]
}

/// RGB→XYZ matrix for the sRGB primaries, scaled so that RGB (1, 1, 1) maps
/// exactly onto `wp`.
fn rgb_to_xyz_matrix(wp: &WhitePoint) -> Mat3 {
    let cols: Vec<[f64; 3]> = PRIMARIES
        .iter()
        .map(|&(x, y)| [x / y, 1.0, (1.0 - x - y) / y])
        .collect();
    let unscaled = [
        [cols[0][0], cols[1][0], cols[2][0]],
        [cols[0][1], cols[1][1], cols[2][1]],
        [cols[0][2], cols[1][2], cols[2][2]],
    ];
    let s = mat_mul_vec(&mat_inverse(&unscaled), [wp.xn, wp.yn, wp.zn]);
    let mut m = unscaled;
    for row in m.iter_mut() {
        for (j, v) in row.iter_mut().enumerate() {
            *v *= s[j];
        }
    }
    m
}

fn matrices(wp: &WhitePoint) -> (Mat3, Mat3) {
    static D65: OnceLock<(Mat3, Mat3)> = OnceLock::new();
    let build = |wp: &WhitePoint| {
        let m = rgb_to_xyz_matrix(wp);
        (m, mat_inverse(&m))
    };
    if *wp == WhitePoint::D65 {
        *D65.get_or_init(|| build(wp))
    } else {
        build(wp)
    }
}

/// The RGB→XYZ matrix in use for `wp`.
pub fn rgb_xyz_matrix(wp: &WhitePoint) -> [[f64; 3]; 3] {
    matrices(wp).0
}

pub fn rgb_to_xyz(c: LinearRgb, wp: &WhitePoint) -> Xyz {
    let [x, y, z] = mat_mul_vec(&matrices(wp).0, [c.r, c.g, c.b]);
    Xyz { x, y, z }
}

pub fn xyz_to_rgb(c: Xyz, wp: &WhitePoint) -> LinearRgb {
    let [r, g, b] = mat_mul_vec(&matrices(wp).1, [c.x, c.y, c.z]);
    LinearRgb { r, g, b }
}

// XYZ <-> Lab.

const DELTA: f64 = 6.0 / 29.0;

/// The two-branch companding function of CIELAB.
pub fn lab_f(t: f64) -> f64 {
    if t > DELTA * DELTA * DELTA {
        t.cbrt()
    } else {
        t / (3.0 * DELTA * DELTA) + 4.0 / 29.0
    }
}

fn lab_f_inv(u: f64) -> f64 {
    if u > DELTA {
        u * u * u
    } else {
        3.0 * DELTA * DELTA * (u - 4.0 / 29.0)
    }
}

fn lightness(y: f64, wp: &WhitePoint) -> f64 {
    116.0 * lab_f(y / wp.yn) - 16.0
}

pub fn xyz_to_lab(c: Xyz, wp: &WhitePoint) -> Lab {
    let fx = lab_f(c.x / wp.xn);
    let fy = lab_f(c.y / wp.yn);
    let fz = lab_f(c.z / wp.zn);
    Lab { l: 116.0 * fy - 16.0, a: 500.0 * (fx - fy), b: 200.0 * (fy - fz) }
}

pub fn lab_to_xyz(c: Lab, wp: &WhitePoint) -> Xyz {
    let fy = (c.l + 16.0) / 116.0;
    let fx = fy + c.a / 500.0;
    let fz = fy - c.b / 200.0;
    Xyz { x: wp.xn * lab_f_inv(fx), y: wp.yn * lab_f_inv(fy), z: wp.zn * lab_f_inv(fz) }
}

// XYZ <-> Luv.

fn uv_prime(c: Xyz) -> Option<(f64, f64)> {
    let d = c.x + 15.0 * c.y + 3.0 * c.z;
    (d != 0.0).then(|| (4.0 * c.x / d, 9.0 * c.y / d))
}

pub fn xyz_to_luv(c: Xyz, wp: &WhitePoint) -> Result<Luv> {
    let Some((u, v)) = uv_prime(c) else {
        if c.x == 0.0 && c.y == 0.0 && c.z == 0.0 {
            return Ok(Luv::default());
        }
        return Err(ColorError::Domain(format!(
            "u'v' chromaticity undefined for XYZ ({}, {}, {})",
            c.x, c.y, c.z
        )));
    };
    let (un, vn) = uv_prime(wp.as_xyz()).expect("white point has positive tristimulus");
    let l = lightness(c.y, wp);
    Ok(Luv { l, u: 13.0 * l * (u - un), v: 13.0 * l * (v - vn) })
}

pub fn luv_to_xyz(c: Luv, wp: &WhitePoint) -> Result<Xyz> {
    if c.l == 0.0 {
        return Ok(Xyz::default());
    }
    let (un, vn) = uv_prime(wp.as_xyz()).expect("white point has positive tristimulus");
    let u = c.u / (13.0 * c.l) + un;
    let v = c.v / (13.0 * c.l) + vn;
    if v == 0.0 {
        return Err(ColorError::Domain(format!("v' = 0 for Luv ({}, {}, {})", c.l, c.u, c.v)));
    }
    let y = wp.yn * lab_f_inv((c.l + 16.0) / 116.0);
    Ok(Xyz { x: y * 9.0 * u / (4.0 * v), y, z: y * (12.0 - 3.0 * u - 20.0 * v) / (4.0 * v) })
}

// HSV / HSL on gamma-encoded channels in [0, 1].

fn hue_of(r: f64, g: f64, b: f64, max: f64, chroma: f64) -> f64 {
    if chroma == 0.0 {
        return 0.0;
    }
    let h = if max == r {
        ((g - b) / chroma).rem_euclid(6.0)
    } else if max == g {
        (b - r) / chroma + 2.0
    } else {
        (r - g) / chroma + 4.0
    };
    wrap_hue(60.0 * h)
}

/// Wraps degrees into `[0, 360)`.
pub fn wrap_hue(h: f64) -> f64 {
    let w = h.rem_euclid(360.0);
    // rem_euclid can round up to exactly 360 for tiny negative inputs
    if w >= 360.0 {
        0.0
    } else {
        w
    }
}

fn unit_to_hsv([r, g, b]: [f64; 3]) -> Hsv {
    let max = r.max(g).max(b);
    let min = r.min(g).min(b);
    let chroma = max - min;
    let s = if max == 0.0 { 0.0 } else { chroma / max };
    Hsv { h: hue_of(r, g, b, max, chroma), s, v: max }
}

fn unit_to_hsl([r, g, b]: [f64; 3]) -> Hsl {
    let max = r.max(g).max(b);
    let min = r.min(g).min(b);
    let chroma = max - min;
    let l = (max + min) / 2.0;
    let s = if chroma == 0.0 { 0.0 } else { chroma / (1.0 - (2.0 * l - 1.0).abs()) };
    Hsl { h: hue_of(r, g, b, max, chroma), s: s.clamp(0.0, 1.0), l }
}

fn hue_chroma_to_unit(h: f64, chroma: f64, m: f64) -> [f64; 3] {
    let hp = wrap_hue(h) / 60.0;
    let x = chroma * (1.0 - (hp.rem_euclid(2.0) - 1.0).abs());
    let (r, g, b) = match hp as u32 {
        0 => (chroma, x, 0.0),
        1 => (x, chroma, 0.0),
        2 => (0.0, chroma, x),
        3 => (0.0, x, chroma),
        4 => (x, 0.0, chroma),
        _ => (chroma, 0.0, x),
    };
    [r + m, g + m, b + m]
}

fn hsv_to_unit(c: Hsv) -> [f64; 3] {
    let chroma = c.v * c.s;
    hue_chroma_to_unit(c.h, chroma, c.v - chroma)
}

fn hsl_to_unit(c: Hsl) -> [f64; 3] {
    let chroma = (1.0 - (2.0 * c.l - 1.0).abs()) * c.s;
    hue_chroma_to_unit(c.h, chroma, c.l - chroma / 2.0)
}

pub fn rgb_to_hsv(c: Srgb8) -> Hsv {
    unit_to_hsv(c.unit())
}

pub fn rgb_to_hsl(c: Srgb8) -> Hsl {
    unit_to_hsl(c.unit())
}

pub fn hsv_to_rgb(c: Hsv) -> Srgb8 {
    let [r, g, b] = hsv_to_unit(c);
    Srgb8::new(quantize(r * 255.0), quantize(g * 255.0), quantize(b * 255.0))
}

pub fn hsl_to_rgb(c: Hsl) -> Srgb8 {
    let [r, g, b] = hsl_to_unit(c);
    Srgb8::new(quantize(r * 255.0), quantize(g * 255.0), quantize(b * 255.0))
}

// Dispatch.

fn to_linear(c: &Color, wp: &WhitePoint) -> Result<LinearRgb> {
    Ok(match *c {
        Color::Srgb8(s) => srgb_to_linear(s),
        Color::LinearRgb(l) => l,
        Color::Xyz(x) => xyz_to_rgb(x, wp),
        Color::Lab(l) => xyz_to_rgb(lab_to_xyz(l, wp), wp),
        Color::Luv(l) => xyz_to_rgb(luv_to_xyz(l, wp)?, wp),
        Color::Hsv(h) => unit_to_linear(hsv_to_unit(h)),
        Color::Hsl(h) => unit_to_linear(hsl_to_unit(h)),
    })
}

/// Converts `c` into `target`. Converting to the color's own space returns it
/// unchanged.
pub fn convert(c: &Color, target: ColorSpaceTag, wp: &WhitePoint) -> Result<Color> {
    if c.tag() == target {
        return Ok(*c);
    }
    // Direct routes that avoid a lossy trip through linear light.
    match (*c, target) {
        (Color::Srgb8(s), ColorSpaceTag::Hsv) => return Ok(Color::Hsv(rgb_to_hsv(s))),
        (Color::Srgb8(s), ColorSpaceTag::Hsl) => return Ok(Color::Hsl(rgb_to_hsl(s))),
        (Color::Hsv(h), ColorSpaceTag::Srgb8) => return Ok(Color::Srgb8(hsv_to_rgb(h))),
        (Color::Hsl(h), ColorSpaceTag::Srgb8) => return Ok(Color::Srgb8(hsl_to_rgb(h))),
        (Color::Xyz(x), ColorSpaceTag::Lab) => return Ok(Color::Lab(xyz_to_lab(x, wp))),
        (Color::Xyz(x), ColorSpaceTag::Luv) => return Ok(Color::Luv(xyz_to_luv(x, wp)?)),
        (Color::Lab(l), ColorSpaceTag::Xyz) => return Ok(Color::Xyz(lab_to_xyz(l, wp))),
        (Color::Luv(l), ColorSpaceTag::Xyz) => return Ok(Color::Xyz(luv_to_xyz(l, wp)?)),
        _ => {}
    }
    let xyz_of = |c: &Color| -> Result<Xyz> {
        match *c {
            Color::Xyz(x) => Ok(x),
            Color::Lab(l) => Ok(lab_to_xyz(l, wp)),
            Color::Luv(l) => luv_to_xyz(l, wp),
            _ => Ok(rgb_to_xyz(to_linear(c, wp)?, wp)),
        }
    };
    Ok(match target {
        ColorSpaceTag::Srgb8 => Color::Srgb8(linear_to_srgb(to_linear(c, wp)?)),
        ColorSpaceTag::LinearRgb => Color::LinearRgb(to_linear(c, wp)?),
        ColorSpaceTag::Xyz => Color::Xyz(xyz_of(c)?),
        ColorSpaceTag::Lab => Color::Lab(xyz_to_lab(xyz_of(c)?, wp)),
        ColorSpaceTag::Luv => Color::Luv(xyz_to_luv(xyz_of(c)?, wp)?),
        ColorSpaceTag::Hsv => Color::Hsv(unit_to_hsv(linear_to_unit(to_linear(c, wp)?))),
        ColorSpaceTag::Hsl => Color::Hsl(unit_to_hsl(linear_to_unit(to_linear(c, wp)?))),
    })
}

/// Shorthand for converting an 8-bit color.
pub fn convert_srgb(c: Srgb8, target: ColorSpaceTag, wp: &WhitePoint) -> Result<Color> {
    convert(&Color::Srgb8(c), target, wp)
}
