use crate::grid::{GridShape, ImageGrid};
use crate::scalar::Real;

/// Box-blur radii, in feature order.
pub const BLUR_RADII: [usize; 2] = [1, 3];

/// Per-pixel features, pixel-major.
///
/// For a `C`-channel image the order is: the `C` raw channels, the `C`
/// channels blurred with radius 1, the `C` channels blurred with radius 3,
/// then `row / (H - 1)` and `col / (W - 1)` (0 for a unit dimension).
#[derive(Clone, Debug, PartialEq)]
pub struct FeatureStack<T> {
    shape: GridShape,
    dim: usize,
    data: Vec<T>,
}

impl<T: Real> FeatureStack<T> {
    pub fn shape(&self) -> GridShape {
        self.shape
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn data(&self) -> &[T] {
        &self.data
    }

    /// Feature vector of the pixel with row-major index `index`.
    pub fn pixel(&self, index: usize) -> &[T] {
        &self.data[index * self.dim..(index + 1) * self.dim]
    }

    pub fn rows(&self) -> impl Iterator<Item = &[T]> + '_ {
        self.data.chunks_exact(self.dim)
    }
}

pub fn feature_dim(channels: usize) -> usize {
    (1 + BLUR_RADII.len()) * channels + 2
}

/// Half-sample symmetric reflection of `i` into `0..n`: `-1 -> 0`, `n -> n - 1`.
pub fn reflect_index(i: isize, n: usize) -> usize {
    let period = 2 * n as isize;
    let k = i.rem_euclid(period);
    if k < n as isize {
        k as usize
    } else {
        (period - 1 - k) as usize
    }
}

/// Mean over the `(2r + 1)²` window with reflecting boundary.
pub fn box_blur<T: Real>(plane: &[T], shape: GridShape, r: usize) -> Vec<T> {
    let (h, w) = (shape.height(), shape.width());
    let norm = T::of((2 * r + 1) as f64);
    let ri = r as isize;
    let mut horiz = vec![T::zero(); plane.len()];
    for row in 0..h {
        let line = &plane[row * w..(row + 1) * w];
        for col in 0..w {
            let mut acc = T::zero();
            for k in -ri..=ri {
                acc = acc + line[reflect_index(col as isize + k, w)];
            }
            horiz[row * w + col] = acc / norm;
        }
    }
    let mut out = vec![T::zero(); plane.len()];
    for row in 0..h {
        for col in 0..w {
            let mut acc = T::zero();
            for k in -ri..=ri {
                acc = acc + horiz[reflect_index(row as isize + k, h) * w + col];
            }
            out[row * w + col] = acc / norm;
        }
    }
    out
}

fn unit_coord(i: usize, n: usize) -> f64 {
    if n <= 1 {
        0.0
    } else {
        i as f64 / (n - 1) as f64
    }
}

pub fn extract_features<T: Real>(img: &ImageGrid<T>) -> FeatureStack<T> {
    let shape = img.shape();
    let channels = img.channels();
    let dim = feature_dim(channels);
    let mut planes: Vec<Vec<T>> = (0..channels).map(|c| img.channel(c).to_vec()).collect();
    for r in BLUR_RADII {
        for c in 0..channels {
            planes.push(box_blur(img.channel(c), shape, r));
        }
    }
    let mut data = Vec::with_capacity(dim * shape.len());
    for (i, p) in shape.pixels().enumerate() {
        data.extend(planes.iter().map(|pl| pl[i]));
        data.push(T::of(unit_coord(p.row, shape.height())));
        data.push(T::of(unit_coord(p.col, shape.width())));
    }
    FeatureStack { shape, dim, data }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn reflection() {
        let r: Vec<usize> = (-3..7).map(|i| reflect_index(i, 4)).collect();
        assert_eq!(r, vec![2, 1, 0, 0, 1, 2, 3, 3, 2, 1]);
        assert!((-5..5).all(|i| reflect_index(i, 1) == 0));
    }

    #[test]
    fn constant_image_blurs_to_constant() {
        let shape = GridShape::new(5, 7).unwrap();
        let img = ImageGrid::filled(shape, 3, 0.25f64).unwrap();
        let f = extract_features(&img);
        assert_eq!(f.dim(), 11);
        for row in f.rows() {
            assert!(row[..9].iter().all(|&v| (v - 0.25).abs() < 1e-15));
        }
    }

    #[test]
    fn unit_grid_coordinates() {
        let img = ImageGrid::filled(GridShape::new(1, 1).unwrap(), 1, 0.5f32).unwrap();
        let f = extract_features(&img);
        assert_eq!(f.pixel(0), &[0.5, 0.5, 0.5, 0.0, 0.0]);
    }

    #[test]
    fn coordinates_span_unit_interval() {
        let img = ImageGrid::filled(GridShape::new(3, 5).unwrap(), 1, 0.0f64).unwrap();
        let f = extract_features(&img);
        assert_eq!(&f.pixel(0)[3..], &[0.0, 0.0]);
        assert_eq!(&f.pixel(14)[3..], &[1.0, 1.0]);
        assert_eq!(&f.pixel(7)[3..], &[0.5, 0.5]);
    }
}
