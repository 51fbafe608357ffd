//! Real images on a regular grid, the Shepp-Logan phantom and image file formats.

use std::io::{Read, Write};

use serde::{Deserialize, Serialize};

use super::TvError;

/// Largest side length accepted by the phantom and experiment constructors.
pub const MAX_SIDE: usize = 256;

const IMG_MAGIC: &[u8; 4] = b"IMG1";

/// Row-major `height x width` real image.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Image2D {
    height: usize,
    width: usize,
    pixels: Vec<f64>,
}

impl Image2D {
    pub fn new(height: usize, width: usize, pixels: Vec<f64>) -> Result<Self, TvError> {
        if height == 0 || width == 0 {
            return Err(TvError::DimensionMismatch(format!("empty image {height}x{width}")));
        }
        if pixels.len() != height * width {
            return Err(TvError::DimensionMismatch(format!(
                "{} pixels for a {height}x{width} image",
                pixels.len()
            )));
        }
        if pixels.iter().any(|p| !p.is_finite()) {
            return Err(TvError::NonFinite);
        }
        Ok(Self { height, width, pixels })
    }

    pub fn zeros(height: usize, width: usize) -> Self {
        Self {
            height,
            width,
            pixels: vec![0.0; height * width],
        }
    }

    pub fn constant(height: usize, width: usize, value: f64) -> Self {
        Self {
            height,
            width,
            pixels: vec![value; height * width],
        }
    }

    pub fn from_fn(height: usize, width: usize, mut f: impl FnMut(usize, usize) -> f64) -> Self {
        let mut pixels = Vec::with_capacity(height * width);
        for i in 0..height {
            for j in 0..width {
                pixels.push(f(i, j));
            }
        }
        Self { height, width, pixels }
    }

    pub fn height(&self) -> usize {
        self.height
    }

    pub fn width(&self) -> usize {
        self.width
    }

    pub fn len(&self) -> usize {
        self.pixels.len()
    }

    pub fn is_empty(&self) -> bool {
        self.pixels.is_empty()
    }

    pub fn pixels(&self) -> &[f64] {
        &self.pixels
    }

    pub fn pixels_mut(&mut self) -> &mut [f64] {
        &mut self.pixels
    }

    pub fn into_pixels(self) -> Vec<f64> {
        self.pixels
    }

    pub fn get(&self, row: usize, col: usize) -> f64 {
        self.pixels[row * self.width + col]
    }

    pub fn same_shape(&self, other: &Image2D) -> bool {
        self.height == other.height && self.width == other.width
    }

    /// 8-bit binary PGM (P5), min-max scaled to 0..=255. A constant image maps to 0.
    pub fn write_pgm<W: Write>(&self, mut w: W) -> std::io::Result<()> {
        let (lo, hi) = self
            .pixels
            .iter()
            .fold((f64::INFINITY, f64::NEG_INFINITY), |(a, b), &p| (a.min(p), b.max(p)));
        let span = hi - lo;
        write!(w, "P5\n{} {}\n255\n", self.width, self.height)?;
        let bytes: Vec<u8> = self
            .pixels
            .iter()
            .map(|&p| {
                if span > 0.0 {
                    ((p - lo) / span * 255.0).round().clamp(0.0, 255.0) as u8
                } else {
                    0
                }
            })
            .collect();
        w.write_all(&bytes)
    }

    pub fn to_pgm(&self) -> Vec<u8> {
        let mut out = Vec::new();
        self.write_pgm(&mut out).expect("writing to a Vec cannot fail");
        out
    }

    /// `"IMG1"`, `u32` height, `u32` width (little-endian), then the pixels as
    /// little-endian `f64`. Round-trips exactly.
    pub fn write_img1<W: Write>(&self, mut w: W) -> std::io::Result<()> {
        w.write_all(IMG_MAGIC)?;
        w.write_all(&(self.height as u32).to_le_bytes())?;
        w.write_all(&(self.width as u32).to_le_bytes())?;
        for p in &self.pixels {
            w.write_all(&p.to_le_bytes())?;
        }
        Ok(())
    }

    pub fn to_img1(&self) -> Vec<u8> {
        let mut out = Vec::with_capacity(12 + 8 * self.pixels.len());
        self.write_img1(&mut out).expect("writing to a Vec cannot fail");
        out
    }

    pub fn read_img1<R: Read>(mut r: R) -> Result<Self, TvError> {
        let mut head = [0u8; 12];
        r.read_exact(&mut head)
            .map_err(|_| TvError::Format("truncated IMG1 header".into()))?;
        if &head[..4] != IMG_MAGIC {
            return Err(TvError::Format("missing IMG1 magic".into()));
        }
        let height = u32::from_le_bytes(head[4..8].try_into().unwrap()) as usize;
        let width = u32::from_le_bytes(head[8..12].try_into().unwrap()) as usize;
        let mut pixels = Vec::with_capacity(height * width);
        let mut buf = [0u8; 8];
        for _ in 0..height * width {
            r.read_exact(&mut buf)
                .map_err(|_| TvError::Format("truncated IMG1 payload".into()))?;
            pixels.push(f64::from_le_bytes(buf));
        }
        Self::new(height, width, pixels)
    }
}

/// `||x - y||_F / sqrt(#pixels)`
pub fn rms(x: &Image2D, y: &Image2D) -> Result<f64, TvError> {
    if !x.same_shape(y) {
        return Err(TvError::DimensionMismatch(format!(
            "{}x{} vs {}x{}",
            x.height, x.width, y.height, y.width
        )));
    }
    let ss: f64 = x
        .pixels
        .iter()
        .zip(&y.pixels)
        .map(|(a, b)| (a - b) * (a - b))
        .sum();
    Ok((ss / x.len() as f64).sqrt())
}

/// Intensity table of the head phantom.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum PhantomKind {
    /// Original Shepp-Logan intensities (skull 2, brain 1.0 to 1.03).
    #[default]
    Classical,
    /// Higher-contrast variant with intensities in `[0, 1]`.
    Modified,
}

// x0, y0, semi-axis along x, semi-axis along y, rotation (degrees)
const ELLIPSES: [(f64, f64, f64, f64, f64); 10] = [
    (0.0, 0.0, 0.69, 0.92, 0.0),
    (0.0, -0.0184, 0.6624, 0.874, 0.0),
    (0.22, 0.0, 0.11, 0.31, -18.0),
    (-0.22, 0.0, 0.16, 0.41, 18.0),
    (0.0, 0.35, 0.21, 0.25, 0.0),
    (0.0, 0.1, 0.046, 0.046, 0.0),
    (0.0, -0.1, 0.046, 0.046, 0.0),
    (-0.08, -0.605, 0.046, 0.023, 0.0),
    (0.0, -0.605, 0.023, 0.023, 0.0),
    (0.06, -0.605, 0.023, 0.046, 0.0),
];
const CLASSICAL: [f64; 10] = [2.0, -0.98, -0.02, -0.02, 0.01, 0.01, 0.01, 0.01, 0.01, 0.01];
const MODIFIED: [f64; 10] = [1.0, -0.8, -0.2, -0.2, 0.1, 0.1, 0.1, 0.1, 0.1, 0.1];

/// Ten-ellipse head phantom sampled at pixel centres of a `size x size` grid
/// covering `[-1, 1]^2`, with `y` pointing up.
pub fn shepp_logan(size: usize, kind: PhantomKind) -> Result<Image2D, TvError> {
    if size == 0 || size > MAX_SIDE {
        return Err(TvError::DimensionMismatch(format!(
            "phantom size {size} outside 1..={MAX_SIDE}"
        )));
    }
    let intensity = match kind {
        PhantomKind::Classical => CLASSICAL,
        PhantomKind::Modified => MODIFIED,
    };
    let n = size as f64;
    Ok(Image2D::from_fn(size, size, |i, j| {
        let x = (2.0 * j as f64 + 1.0) / n - 1.0;
        let y = 1.0 - (2.0 * i as f64 + 1.0) / n;
        ELLIPSES
            .iter()
            .zip(intensity)
            .filter(|((x0, y0, a, b, phi), _)| {
                let (s, c) = phi.to_radians().sin_cos();
                let (dx, dy) = (x - x0, y - y0);
                let u = dx * c + dy * s;
                let v = -dx * s + dy * c;
                (u / a).powi(2) + (v / b).powi(2) <= 1.0
            })
            .map(|(_, rho)| rho)
            .sum()
    }))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn rms_examples() {
        let u = Image2D::from_fn(3, 4, |i, j| (i * 7 + j) as f64);
        assert_eq!(rms(&u, &u).unwrap(), 0.0);
        let a = Image2D::new(1, 1, vec![3.0]).unwrap();
        let b = Image2D::new(1, 1, vec![1.0]).unwrap();
        assert_eq!(rms(&a, &b).unwrap(), 2.0);
        assert_eq!(rms(&Image2D::zeros(2, 2), &Image2D::constant(2, 2, 1.0)).unwrap(), 1.0);
        assert!(matches!(
            rms(&Image2D::zeros(2, 2), &Image2D::zeros(2, 3)),
            Err(TvError::DimensionMismatch(_))
        ));
    }

    #[test]
    fn img1_round_trip_is_exact() {
        let u = Image2D::from_fn(5, 3, |i, j| (i as f64).sin() * 1e-7 + j as f64 / 3.0);
        let bytes = u.to_img1();
        assert_eq!(&bytes[..4], b"IMG1");
        assert_eq!(Image2D::read_img1(&bytes[..]).unwrap(), u);
        assert!(Image2D::read_img1(&bytes[..10]).is_err());
    }

    #[test]
    fn pgm_header_and_scaling() {
        let u = Image2D::new(1, 3, vec![-1.0, 0.0, 1.0]).unwrap();
        let pgm = u.to_pgm();
        assert!(pgm.starts_with(b"P5\n3 1\n255\n"));
        assert_eq!(&pgm[pgm.len() - 3..], &[0, 128, 255]);
    }

    #[test]
    fn phantom_values() {
        let p = shepp_logan(64, PhantomKind::Classical).unwrap();
        // corners lie outside the skull
        assert_eq!(p.get(0, 0), 0.0);
        // centre pixel is brain tissue: 2 - 0.98 = 1.02
        assert!((p.get(32, 32) - 1.02).abs() < 1e-12);
        let m = shepp_logan(64, PhantomKind::Modified).unwrap();
        assert!(m.pixels().iter().all(|v| (-1e-12..=1.0 + 1e-12).contains(v)));
        assert!(shepp_logan(300, PhantomKind::Classical).is_err());
    }

    #[test]
    fn rejects_bad_images() {
        assert!(Image2D::new(2, 2, vec![0.0; 3]).is_err());
        assert!(matches!(Image2D::new(1, 1, vec![f64::NAN]), Err(TvError::NonFinite)));
    }
}
