//! Perceptual color-difference toolkit.
//!
//! - [`color`]: space-tagged color values and conversions among sRGB, linear
//!   RGB, XYZ, CIELAB, CIELUV, HSV and HSL.
//! - [`metrics`]: color-difference formulas (CIE76, CIE94, CIEDE2000,
//!   CMC(l:c), RGB, cylindrical HSV/HSL, XYZ and Luv distances) and a registry.
//! - [`palette`]: k-means dominant-palette extraction in any color model.
//! - [`evaluation`]: datasets of color pairs with human scores, correlation
//!   and MAE reports, heatmaps, and judgment aggregation.

pub mod color;
pub mod error;
pub mod evaluation;
pub mod metrics;
pub mod palette;

pub use color::{convert, Color, ColorSpaceTag, Hsl, Hsv, Lab, LinearRgb, Luv, Srgb8, WhitePoint, Xyz};
pub use error::{ColorError, Result};
pub use metrics::{MetricDescriptor, Registry};
