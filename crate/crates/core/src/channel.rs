//! Geometric cluster channel model for a uniform linear array.
//!
//! Each user's narrowband uplink channel is a sum of `p` subpath
//! contributions. A cluster center is drawn uniformly on the spatial-frequency
//! circle `[0, 1)`, and the subpaths sit at the center plus i.i.d. Laplacian
//! offsets, so the beamspace image of the channel is a narrow, nearly sparse
//! cluster of bins. Gains carry deterministic per-subpath amplitudes and
//! i.i.d. uniform phases, normalized so that `E[||h_i||^2] = N`.

use std::f64::consts::TAU;

use num_complex::Complex64;
use rand::Rng;

use crate::beamspace::DftMatrix;
use crate::{CMatrix, CVector, Error, Result};

/// Uniform linear array description.
///
/// Only the antenna count enters the math directly: angles are handled as
/// spatial frequencies `theta = (d / lambda) * sin(azimuth)`, so wavelength
/// and spacing matter only for mapping back to physical angles.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ArrayGeometry {
    n_antennas: usize,
    wavelength: f64,
    spacing: f64,
}

impl ArrayGeometry {
    pub fn new(n_antennas: usize, wavelength: f64, spacing: f64) -> Result<Self> {
        if n_antennas == 0 {
            return Err(Error::InvalidParameter("array needs at least one antenna".into()));
        }
        if !(wavelength > 0.0 && wavelength.is_finite()) {
            return Err(Error::InvalidParameter(format!("wavelength must be positive, got {wavelength}")));
        }
        if !(spacing > 0.0 && spacing.is_finite()) {
            return Err(Error::InvalidParameter(format!("spacing must be positive, got {spacing}")));
        }
        Ok(Self { n_antennas, wavelength, spacing })
    }

    /// Array with `d = lambda / 4` element spacing at the given carrier frequency.
    pub fn quarter_wave(n_antennas: usize, carrier_hz: f64) -> Result<Self> {
        if !(carrier_hz > 0.0 && carrier_hz.is_finite()) {
            return Err(Error::InvalidParameter(format!("carrier must be positive, got {carrier_hz}")));
        }
        let wavelength = 299_792_458.0 / carrier_hz;
        Self::new(n_antennas, wavelength, wavelength / 4.0)
    }

    pub fn n_antennas(&self) -> usize {
        self.n_antennas
    }

    pub fn wavelength(&self) -> f64 {
        self.wavelength
    }

    pub fn spacing(&self) -> f64 {
        self.spacing
    }

    /// `d / lambda`, the factor mapping `sin(azimuth)` to spatial frequency.
    pub fn spacing_ratio(&self) -> f64 {
        self.spacing / self.wavelength
    }
}

/// Cluster/subpath parameters for a channel draw.
#[derive(Debug, Clone, PartialEq)]
pub struct ChannelParams {
    n_users: usize,
    n_subpaths: usize,
    /// Laplacian scale of the subpath offsets, in spatial-frequency units.
    cluster_spread: f64,
    /// Relative subpath powers, non-negative, summing to one.
    subpath_powers: Vec<f64>,
}

impl ChannelParams {
    pub fn new(
        n_users: usize,
        n_subpaths: usize,
        cluster_spread: f64,
        subpath_powers: Vec<f64>,
    ) -> Result<Self> {
        if n_users == 0 {
            return Err(Error::InvalidParameter("need at least one user".into()));
        }
        if n_subpaths == 0 {
            return Err(Error::InvalidParameter("need at least one subpath".into()));
        }
        if !(cluster_spread >= 0.0 && cluster_spread.is_finite()) {
            return Err(Error::InvalidParameter(format!(
                "cluster spread must be non-negative, got {cluster_spread}"
            )));
        }
        if subpath_powers.len() != n_subpaths {
            return Err(Error::InvalidParameter(format!(
                "got {} subpath powers for {} subpaths",
                subpath_powers.len(),
                n_subpaths
            )));
        }
        if subpath_powers.iter().any(|&p| !(p >= 0.0) || !p.is_finite()) {
            return Err(Error::InvalidParameter("subpath powers must be non-negative".into()));
        }
        let total: f64 = subpath_powers.iter().sum();
        if (total - 1.0).abs() > 1e-12 {
            return Err(Error::InvalidParameter(format!(
                "subpath powers must sum to 1, got {total}"
            )));
        }
        Ok(Self { n_users, n_subpaths, cluster_spread, subpath_powers })
    }

    /// Equal-power subpaths with the given spread.
    pub fn equal_powers(n_users: usize, n_subpaths: usize, cluster_spread: f64) -> Result<Self> {
        let powers = vec![1.0 / n_subpaths as f64; n_subpaths];
        Self::new(n_users, n_subpaths, cluster_spread, powers)
    }

    pub fn n_users(&self) -> usize {
        self.n_users
    }

    pub fn n_subpaths(&self) -> usize {
        self.n_subpaths
    }

    pub fn cluster_spread(&self) -> f64 {
        self.cluster_spread
    }

    pub fn subpath_powers(&self) -> &[f64] {
        &self.subpath_powers
    }
}

/// One channel draw: the antenna-domain matrix `H`, its beamspace image
/// `G = A^H H`, and the subpath spatial frequencies per user.
#[derive(Debug, Clone, PartialEq)]
pub struct ChannelRealization {
    pub h_matrix: CMatrix,
    pub beamspace_matrix: CMatrix,
    pub path_angles: Vec<Vec<f64>>,
}

impl ChannelRealization {
    /// Builds a realization from explicit per-user subpaths.
    ///
    /// Each user is a list of `(spatial_frequency, gain)` pairs; the user
    /// column is `sqrt(N / p) * sum_l gain_l * a(theta_l)`.
    pub fn synthesize(geometry: &ArrayGeometry, paths: &[Vec<(f64, Complex64)>]) -> Result<Self> {
        if paths.is_empty() {
            return Err(Error::InvalidParameter("need at least one user".into()));
        }
        let n = geometry.n_antennas();
        let m = paths.len();
        let mut h = CMatrix::zeros(n, m);
        let mut angles = Vec::with_capacity(m);
        for (u, user_paths) in paths.iter().enumerate() {
            if user_paths.is_empty() {
                return Err(Error::InvalidParameter(format!("user {u} has no subpaths")));
            }
            let scale = (n as f64 / user_paths.len() as f64).sqrt();
            let mut column = CVector::zeros(n);
            let mut user_angles = Vec::with_capacity(user_paths.len());
            for &(freq, gain) in user_paths {
                column += steering_vector(geometry, freq) * (gain * scale);
                user_angles.push(freq);
            }
            h.set_column(u, &column);
            angles.push(user_angles);
        }
        let dft = DftMatrix::new(n);
        let g = dft.project(&h)?;
        Ok(Self { h_matrix: h, beamspace_matrix: g, path_angles: angles })
    }
}

/// Unit-norm array response at spatial frequency `theta`: element `k` is
/// `exp(-j 2 pi theta k) / sqrt(N)`.
pub fn steering_vector(geometry: &ArrayGeometry, spatial_freq: f64) -> CVector {
    steering(geometry.n_antennas(), spatial_freq)
}

pub(crate) fn steering(n: usize, spatial_freq: f64) -> CVector {
    let scale = 1.0 / (n as f64).sqrt();
    CVector::from_fn(n, |k, _| {
        Complex64::from_polar(scale, -TAU * spatial_freq * k as f64)
    })
}

/// Draws one multi-user channel.
///
/// Per user: a cluster center uniform on `[0, 1)`, `p` Laplacian subpath
/// offsets, and unit-mean-power subpath gains with uniform phases. The same
/// seed always produces the same realization.
pub fn generate_channel<R: Rng + ?Sized>(
    geometry: &ArrayGeometry,
    params: &ChannelParams,
    rng: &mut R,
) -> Result<ChannelRealization> {
    let p = params.n_subpaths();
    let mut paths = Vec::with_capacity(params.n_users());
    for _ in 0..params.n_users() {
        let center: f64 = rng.random();
        let mut user = Vec::with_capacity(p);
        for l in 0..p {
            let offset = laplacian(rng, params.cluster_spread());
            let phase = rng.random::<f64>() * TAU;
            // Scaled so the p gains carry total power p, which together with
            // the sqrt(N / p) prefactor gives E[||h_i||^2] = N.
            let amplitude = (params.subpath_powers()[l] * p as f64).sqrt();
            user.push((center + offset, Complex64::from_polar(amplitude, phase)));
        }
        paths.push(user);
    }
    ChannelRealization::synthesize(geometry, &paths)
}

/// Zero-mean Laplacian sample with scale `b` via inverse CDF.
fn laplacian<R: Rng + ?Sized>(rng: &mut R, b: f64) -> f64 {
    if b == 0.0 {
        // Still consume one draw so the stream layout does not depend on the spread.
        let _: f64 = rng.random();
        return 0.0;
    }
    let u: f64 = rng.random::<f64>().max(1e-300);
    if u < 0.5 {
        b * (2.0 * u).ln()
    } else {
        -b * (2.0 * (1.0 - u)).ln()
    }
}
