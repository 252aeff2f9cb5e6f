//! Colour arithmetic: WCAG luminance and contrast, dichromacy simulation,
//! and CIELAB distance.

use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Deserializer, Serialize, Serializer};
use thiserror::Error;

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Default)]
pub struct Rgb {
    pub r: u8,
    pub g: u8,
    pub b: u8,
}

impl Rgb {
    pub const BLACK: Rgb = Rgb::new(0, 0, 0);
    pub const WHITE: Rgb = Rgb::new(255, 255, 255);

    pub const fn new(r: u8, g: u8, b: u8) -> Self {
        Rgb { r, g, b }
    }

    pub const fn from_u32(v: u32) -> Self {
        Rgb::new((v >> 16) as u8, (v >> 8) as u8, v as u8)
    }

    pub fn channels(self) -> [u8; 3] {
        [self.r, self.g, self.b]
    }

    /// Lower-case hex without `#`, as used in paint ids.
    pub fn hex_lower(self) -> String {
        format!("{:02x}{:02x}{:02x}", self.r, self.g, self.b)
    }

    /// Largest per-channel absolute difference.
    pub fn max_channel_diff(self, other: Rgb) -> u8 {
        self.channels()
            .iter()
            .zip(other.channels())
            .map(|(a, b)| a.abs_diff(b))
            .max()
            .unwrap_or(0)
    }
}

impl fmt::Display for Rgb {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "#{:02X}{:02X}{:02X}", self.r, self.g, self.b)
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
#[error("cannot parse colour `{0}`")]
pub struct ColorParseError(pub String);

const NAMED: &[(&str, u32)] = &[
    ("black", 0x000000),
    ("white", 0xFFFFFF),
    ("gray", 0x808080),
    ("grey", 0x808080),
    ("silver", 0xC0C0C0),
    ("red", 0xFF0000),
    ("green", 0x008000),
    ("lime", 0x00FF00),
    ("blue", 0x0000FF),
    ("yellow", 0xFFFF00),
    ("orange", 0xFFA500),
    ("purple", 0x800080),
    ("navy", 0x000080),
];

impl FromStr for Rgb {
    type Err = ColorParseError;

    /// Accepts `#rgb`, `#rrggbb`, `rgb(r, g, b)` and a few CSS colour names.
    fn from_str(s: &str) -> Result<Self, Self::Err> {
        let err = || ColorParseError(s.to_string());
        let t = s.trim().to_ascii_lowercase();
        if let Some(hex) = t.strip_prefix('#') {
            let digits =
                |i: usize, n: usize| u8::from_str_radix(&hex[i..i + n], 16).map_err(|_| err());
            return match hex.len() {
                3 => Ok(Rgb::new(
                    digits(0, 1)? * 17,
                    digits(1, 1)? * 17,
                    digits(2, 1)? * 17,
                )),
                6 => Ok(Rgb::new(digits(0, 2)?, digits(2, 2)?, digits(4, 2)?)),
                _ => Err(err()),
            };
        }
        if let Some(body) = t.strip_prefix("rgb(").and_then(|b| b.strip_suffix(')')) {
            let parts: Vec<u8> = body
                .split(',')
                .map(|p| p.trim().parse::<u8>())
                .collect::<Result<_, _>>()
                .map_err(|_| err())?;
            return match parts.as_slice() {
                [r, g, b] => Ok(Rgb::new(*r, *g, *b)),
                _ => Err(err()),
            };
        }
        NAMED
            .iter()
            .find(|(name, _)| *name == t)
            .map(|(_, v)| Rgb::from_u32(*v))
            .ok_or_else(err)
    }
}

impl Serialize for Rgb {
    fn serialize<S: Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        s.collect_str(self)
    }
}

impl<'de> Deserialize<'de> for Rgb {
    fn deserialize<D: Deserializer<'de>>(d: D) -> Result<Self, D::Error> {
        let s = String::deserialize(d)?;
        s.parse().map_err(serde::de::Error::custom)
    }
}

fn wcag_linear(channel: u8) -> f64 {
    let c = f64::from(channel) / 255.0;
    if c <= 0.03928 {
        c / 12.92
    } else {
        ((c + 0.055) / 1.055).powf(2.4)
    }
}

/// WCAG 2.0 relative luminance.
pub fn relative_luminance(c: Rgb) -> f64 {
    0.2126 * wcag_linear(c.r) + 0.7152 * wcag_linear(c.g) + 0.0722 * wcag_linear(c.b)
}

/// WCAG 2.0 contrast ratio, in `[1, 21]`.
pub fn contrast_ratio(a: Rgb, b: Rgb) -> f64 {
    let (la, lb) = (relative_luminance(a), relative_luminance(b));
    let (hi, lo) = if la >= lb { (la, lb) } else { (lb, la) };
    (hi + 0.05) / (lo + 0.05)
}

/// WCAG AA minimum for normal-size text.
pub const AA_TEXT_CONTRAST: f64 = 4.5;

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum CvdKind {
    Protanopia,
    Deuteranopia,
    Tritanopia,
}

impl CvdKind {
    pub const ALL: [CvdKind; 3] = [
        CvdKind::Protanopia,
        CvdKind::Deuteranopia,
        CvdKind::Tritanopia,
    ];

    pub fn as_str(self) -> &'static str {
        match self {
            CvdKind::Protanopia => "protanopia",
            CvdKind::Deuteranopia => "deuteranopia",
            CvdKind::Tritanopia => "tritanopia",
        }
    }

    /// Dichromat projection in linear sRGB.
    ///
    /// Protanopia and deuteranopia use the Viénot, Brettel & Mollon (1999)
    /// single-plane matrices (linear-sRGB form as published by DaltonLens).
    /// Tritanopia uses the same construction: Hunt-Pointer-Estevez LMS
    /// normalised to D65, with the S response replaced by the plane through
    /// white and the sRGB red primary. Each matrix is idempotent and maps
    /// white to white.
    pub fn matrix(self) -> [[f64; 3]; 3] {
        match self {
            CvdKind::Protanopia => [
                [0.11238, 0.88762, 0.0],
                [0.11238, 0.88762, 0.0],
                [0.00401, -0.00401, 1.0],
            ],
            CvdKind::Deuteranopia => [
                [0.29275, 0.70725, 0.0],
                [0.29275, 0.70725, 0.0],
                [-0.02234, 0.02234, 1.0],
            ],
            CvdKind::Tritanopia => [
                [1.0, 0.12737, -0.12737],
                [0.0, 0.87391, 0.12609],
                [0.0, 0.87391, 0.12609],
            ],
        }
    }
}

impl fmt::Display for CvdKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
#[error("unknown colour-vision deficiency `{0}` (expected protanopia, deuteranopia or tritanopia)")]
pub struct UnknownCvdKind(pub String);

impl FromStr for CvdKind {
    type Err = UnknownCvdKind;
    fn from_str(s: &str) -> Result<Self, Self::Err> {
        CvdKind::ALL
            .into_iter()
            .find(|k| k.as_str() == s.trim().to_ascii_lowercase())
            .ok_or_else(|| UnknownCvdKind(s.to_string()))
    }
}

pub fn srgb_to_linear(channel: u8) -> f64 {
    let c = f64::from(channel) / 255.0;
    if c <= 0.04045 {
        c / 12.92
    } else {
        ((c + 0.055) / 1.055).powf(2.4)
    }
}

pub fn linear_to_srgb(v: f64) -> u8 {
    let v = v.clamp(0.0, 1.0);
    let s = if v <= 0.003_130_8 {
        v * 12.92
    } else {
        1.055 * v.powf(1.0 / 2.4) - 0.055
    };
    (s * 255.0).round().clamp(0.0, 255.0) as u8
}

/// Simulated appearance of `c` to a dichromat.
pub fn simulate_cvd(c: Rgb, kind: CvdKind) -> Rgb {
    let lin = c.channels().map(srgb_to_linear);
    let m = kind.matrix();
    let row = |i: usize| m[i][0] * lin[0] + m[i][1] * lin[1] + m[i][2] * lin[2];
    Rgb::new(
        linear_to_srgb(row(0)),
        linear_to_srgb(row(1)),
        linear_to_srgb(row(2)),
    )
}

/// CIELAB coordinates, white point taken as the sRGB white under the same matrix.
pub fn to_lab(c: Rgb) -> [f64; 3] {
    let [r, g, b] = c.channels().map(srgb_to_linear);
    let x = 0.4124 * r + 0.3576 * g + 0.1805 * b;
    let y = 0.2126 * r + 0.7152 * g + 0.0722 * b;
    let z = 0.0193 * r + 0.1192 * g + 0.9505 * b;
    const D: f64 = 6.0 / 29.0;
    let f = |t: f64| {
        if t > D * D * D {
            t.cbrt()
        } else {
            t / (3.0 * D * D) + 4.0 / 29.0
        }
    };
    let (fx, fy, fz) = (f(x / 0.9505), f(y), f(z / 1.089));
    [116.0 * fy - 16.0, 500.0 * (fx - fy), 200.0 * (fy - fz)]
}

/// CIE76 colour difference (Euclidean distance in CIELAB).
pub fn delta_e(a: Rgb, b: Rgb) -> f64 {
    let (la, lb) = (to_lab(a), to_lab(b));
    la.iter()
        .zip(lb)
        .map(|(x, y)| (x - y).powi(2))
        .sum::<f64>()
        .sqrt()
}
