//! Dense row-major f64 tensors. Spatial feature maps use the axis order
//! [channels, z, y, x] with x contiguous, matching the simulator's cell
//! ordering; token matrices are [tokens, channels].

use rand::Rng;
use serde::{Deserialize, Serialize};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Tensor {
    pub shape: Vec<usize>,
    pub data: Vec<f64>,
}

impl Tensor {
    pub fn zeros(shape: &[usize]) -> Self {
        let n: usize = shape.iter().product();
        Self { shape: shape.to_vec(), data: vec![0.0; n] }
    }

    pub fn from_vec(shape: &[usize], data: Vec<f64>) -> Self {
        assert_eq!(shape.iter().product::<usize>(), data.len(), "shape/data mismatch");
        Self { shape: shape.to_vec(), data }
    }

    pub fn scalar(v: f64) -> Self {
        Self { shape: vec![1], data: vec![v] }
    }

    pub fn len(&self) -> usize {
        self.data.len()
    }

    pub fn is_empty(&self) -> bool {
        self.data.is_empty()
    }

    /// Fan-in-scaled uniform init on ±√(1/fan_in).
    pub fn fan_in_uniform<R: Rng>(shape: &[usize], fan_in: usize, rng: &mut R) -> Self {
        let bound = (1.0 / fan_in as f64).sqrt();
        let n: usize = shape.iter().product();
        let data = (0..n).map(|_| rng.gen_range(-bound..bound)).collect();
        Self { shape: shape.to_vec(), data }
    }

    pub fn gaussian<R: Rng>(shape: &[usize], std: f64, rng: &mut R) -> Self {
        let n: usize = shape.iter().product();
        let data =
            (0..n).map(|_| std * rng.sample::<f64, _>(rand_distr::StandardNormal)).collect();
        Self { shape: shape.to_vec(), data }
    }
}

/// Shape of a spatial feature map [c, z, y, x].
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct SpatialShape {
    pub c: usize,
    pub z: usize,
    pub y: usize,
    pub x: usize,
}

impl SpatialShape {
    pub fn of(t: &Tensor) -> Self {
        assert_eq!(t.shape.len(), 4, "expected a [c,z,y,x] tensor, got {:?}", t.shape);
        Self { c: t.shape[0], z: t.shape[1], y: t.shape[2], x: t.shape[3] }
    }

    pub fn voxels(&self) -> usize {
        self.z * self.y * self.x
    }

    pub fn len(&self) -> usize {
        self.c * self.voxels()
    }

    pub fn to_vec(&self) -> Vec<usize> {
        vec![self.c, self.z, self.y, self.x]
    }
}
