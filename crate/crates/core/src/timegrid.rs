//! Uniform time grids and complex distributions with explicit point masses.
//!
//! A residence-time amplitude distribution generally has a smooth part plus
//! delta-weights sitting at tau = 0 or tau = T (the never-switching paths).
//! The point masses are kept symbolic — location and complex weight — and
//! every quadrature here folds them in analytically instead of discretizing
//! them as tall spikes.

use std::io::{self, Write};

use num_complex::Complex64;

use crate::{Error, Result};

/// Grid points per unit time used when a caller does not pin the resolution;
/// resolves the fastest interior oscillation with a comfortable margin.
pub const DEFAULT_STEPS_PER_UNIT_TIME: f64 = 20.0;

/// Default step count for a total time `t_total` (at least 100).
pub fn default_steps(t_total: f64) -> usize {
    ((DEFAULT_STEPS_PER_UNIT_TIME * t_total).ceil() as usize).max(100)
}

/// Uniform grid of `steps + 1` samples covering `[0, t_total]` inclusive.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TimeGrid {
    t_total: f64,
    steps: usize,
}

impl TimeGrid {
    pub fn new(t_total: f64, steps: usize) -> Result<Self> {
        if !(t_total > 0.0) || !t_total.is_finite() {
            return Err(Error::InvalidGrid(format!(
                "total time must be positive and finite, got {t_total}"
            )));
        }
        if steps < 2 {
            return Err(Error::InvalidGrid(format!(
                "need at least 2 subintervals, got {steps}"
            )));
        }
        Ok(Self { t_total, steps })
    }

    pub fn t_total(&self) -> f64 {
        self.t_total
    }

    /// Number of uniform subintervals.
    pub fn steps(&self) -> usize {
        self.steps
    }

    /// Number of samples, `steps + 1`.
    pub fn len(&self) -> usize {
        self.steps + 1
    }

    pub fn is_empty(&self) -> bool {
        false
    }

    /// Sample spacing `t_total / steps`.
    pub fn spacing(&self) -> f64 {
        self.t_total / self.steps as f64
    }

    /// The `j`-th sample time.
    pub fn tau(&self, j: usize) -> f64 {
        debug_assert!(j <= self.steps);
        j as f64 * self.spacing()
    }

    pub fn taus(&self) -> impl Iterator<Item = f64> + '_ {
        (0..self.len()).map(|j| self.tau(j))
    }
}

/// Location of a permitted point mass.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord)]
pub enum SingularPoint {
    /// tau = 0.
    Origin,
    /// tau = T.
    End,
}

impl SingularPoint {
    pub const ALL: [SingularPoint; 2] = [SingularPoint::Origin, SingularPoint::End];

    pub fn location(&self, grid: &TimeGrid) -> f64 {
        match self {
            SingularPoint::Origin => 0.0,
            SingularPoint::End => grid.t_total(),
        }
    }
}

/// Complex-valued density sampled on a [`TimeGrid`] plus point masses at the
/// interval ends.
#[derive(Debug, Clone, PartialEq)]
pub struct AmplitudeDistribution {
    grid: TimeGrid,
    density: Vec<Complex64>,
    singular: [Complex64; 2],
}

impl AmplitudeDistribution {
    pub fn new(
        grid: TimeGrid,
        density: Vec<Complex64>,
        singular: &[(SingularPoint, Complex64)],
    ) -> Result<Self> {
        if density.len() != grid.len() {
            return Err(Error::InvalidDistribution(format!(
                "density has {} samples, grid has {}",
                density.len(),
                grid.len()
            )));
        }
        if density.iter().any(|z| !z.re.is_finite() || !z.im.is_finite()) {
            return Err(Error::InvalidDistribution(
                "density contains a non-finite value".into(),
            ));
        }
        let mut dist = Self {
            grid,
            density,
            singular: [Complex64::ZERO; 2],
        };
        for &(point, weight) in singular {
            if !weight.re.is_finite() || !weight.im.is_finite() {
                return Err(Error::InvalidDistribution(
                    "singular weight is non-finite".into(),
                ));
            }
            dist.singular[point as usize] += weight;
        }
        Ok(dist)
    }

    pub fn zero(grid: TimeGrid) -> Self {
        Self {
            density: vec![Complex64::ZERO; grid.len()],
            grid,
            singular: [Complex64::ZERO; 2],
        }
    }

    pub fn grid(&self) -> &TimeGrid {
        &self.grid
    }

    pub fn density(&self) -> &[Complex64] {
        &self.density
    }

    pub fn singular_weight(&self, point: SingularPoint) -> Complex64 {
        self.singular[point as usize]
    }

    pub fn set_singular(&mut self, point: SingularPoint, weight: Complex64) {
        self.singular[point as usize] = weight;
    }

    /// Linear interpolation of the smooth part at an arbitrary `tau` in
    /// `[0, t_total]`. Point masses are not included.
    pub fn density_at(&self, tau: f64) -> Complex64 {
        let h = self.grid.spacing();
        let x = (tau / h).clamp(0.0, self.grid.steps() as f64);
        let j = (x.floor() as usize).min(self.grid.steps() - 1);
        let frac = x - j as f64;
        self.density[j] * (1.0 - frac) + self.density[j + 1] * frac
    }

    /// Trapezoid rule over the density plus the sum of the point masses.
    pub fn integrate(&self) -> Complex64 {
        trapezoid(&self.density, self.grid.spacing())
            + self.singular[0]
            + self.singular[1]
    }

    /// k-th raw moment, integral of tau^k against the distribution; with
    /// `normalized` the result is divided by [`integrate`](Self::integrate).
    ///
    /// Normalization fails near a Rabi node, where the total integral
    /// vanishes; that is reported, not clamped.
    pub fn moment(&self, k: u32, normalized: bool) -> Result<Complex64> {
        let h = self.grid.spacing();
        let weighted: Vec<Complex64> = self
            .density
            .iter()
            .enumerate()
            .map(|(j, z)| z * self.grid.tau(j).powi(k as i32))
            .collect();
        let mut raw = trapezoid(&weighted, h);
        for point in SingularPoint::ALL {
            raw += self.singular[point as usize] * point.location(&self.grid).powi(k as i32);
        }
        if !normalized {
            return Ok(raw);
        }
        let total = self.integrate();
        let scale = 1.0
            + self.singular.iter().map(|w| w.norm()).sum::<f64>()
            + self.density.iter().map(|z| z.norm()).fold(0.0, f64::max) * self.grid.t_total();
        if total.norm() < 1e-12 * scale {
            return Err(Error::NearZeroNormalization {
                magnitude: total.norm(),
            });
        }
        Ok(raw / total)
    }

    /// Convolution with the unnormalized Gaussian kernel
    /// `exp[-alpha^2 (tau - tau')^2]`, sampled on this grid.
    ///
    /// Point masses contribute exactly as `weight * exp[-alpha^2 (tau - t_s)^2]`;
    /// the output carries no singular part. Fails when the grid cannot resolve
    /// the kernel width `1/alpha`.
    pub fn gauss_convolve(&self, alpha: f64) -> Result<AmplitudeDistribution> {
        if !(alpha > 0.0) {
            return Err(Error::InvalidParameter(format!(
                "coupling must be positive, got {alpha}"
            )));
        }
        let h = self.grid.spacing();
        let width = 1.0 / alpha;
        if h > width / 4.0 {
            return Err(Error::GridResolution { spacing: h, width });
        }
        let a2 = alpha * alpha;
        let n = self.grid.len();
        let mut out = vec![Complex64::ZERO; n];
        // kernel depends only on |j - j'|; precompute one row
        let kernel: Vec<f64> = (0..n)
            .map(|d| (-a2 * (d as f64 * h).powi(2)).exp())
            .collect();
        for (j, slot) in out.iter_mut().enumerate() {
            let mut acc = Complex64::ZERO;
            for (jp, z) in self.density.iter().enumerate() {
                let w = if jp == 0 || jp == n - 1 { 0.5 } else { 1.0 };
                acc += z * (kernel[j.abs_diff(jp)] * w);
            }
            let mut value = acc * h;
            for point in SingularPoint::ALL {
                let d = self.grid.tau(j) - point.location(&self.grid);
                value += self.singular[point as usize] * (-a2 * d * d).exp();
            }
            *slot = value;
        }
        AmplitudeDistribution::new(self.grid, out, &[])
    }

    /// CSV serialization: one comment line per point mass, then
    /// `tau,re_density,im_density` rows.
    pub fn write_csv<W: Write>(&self, mut w: W) -> io::Result<()> {
        for point in SingularPoint::ALL {
            let weight = self.singular[point as usize];
            if weight != Complex64::ZERO {
                writeln!(
                    w,
                    "# singular: t={:.16e} re={:.16e} im={:.16e}",
                    point.location(&self.grid),
                    weight.re,
                    weight.im
                )?;
            }
        }
        writeln!(w, "tau,re_density,im_density")?;
        for (j, z) in self.density.iter().enumerate() {
            writeln!(w, "{:.16e},{:.16e},{:.16e}", self.grid.tau(j), z.re, z.im)?;
        }
        Ok(())
    }
}

fn trapezoid(values: &[Complex64], h: f64) -> Complex64 {
    if values.len() < 2 {
        return Complex64::ZERO;
    }
    let inner: Complex64 = values[1..values.len() - 1].iter().sum();
    (inner + (values[0] + values[values.len() - 1]) * 0.5) * h
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn cx(re: f64, im: f64) -> Complex64 {
        Complex64::new(re, im)
    }

    #[test]
    fn grid_invariants_enforced() {
        assert!(TimeGrid::new(0.0, 10).is_err());
        assert!(TimeGrid::new(-1.0, 10).is_err());
        assert!(TimeGrid::new(1.0, 1).is_err());
        let g = TimeGrid::new(2.0, 4).unwrap();
        assert_eq!(g.len(), 5);
        assert_eq!(g.spacing(), 0.5);
        assert_eq!(g.tau(4), 2.0);
    }

    #[test]
    fn integrate_delta_weight_only() {
        let grid = TimeGrid::new(3.0, 30).unwrap();
        let d = AmplitudeDistribution::new(
            grid,
            vec![Complex64::ZERO; grid.len()],
            &[(SingularPoint::End, cx(1.0, 0.0))],
        )
        .unwrap();
        assert_eq!(d.integrate(), cx(1.0, 0.0));
    }

    #[test]
    fn integrate_constant_density() {
        let grid = TimeGrid::new(7.0, 140).unwrap();
        let c = cx(0.3, -1.2);
        let d = AmplitudeDistribution::new(grid, vec![c; grid.len()], &[]).unwrap();
        let expect = c * 7.0;
        assert!((d.integrate() - expect).norm() < 1e-12);
    }

    #[test]
    fn trapezoid_refinement_is_second_order() {
        // smooth density: error(M) / error(2M) ~ 4
        let f = |t: f64| cx((1.7 * t).sin(), (0.9 * t).cos());
        let exact = cx(
            (1.0 - (1.7f64 * 5.0).cos()) / 1.7,
            (0.9f64 * 5.0).sin() / 0.9,
        );
        let err = |steps: usize| {
            let grid = TimeGrid::new(5.0, steps).unwrap();
            let d = AmplitudeDistribution::new(grid, grid.taus().map(f).collect(), &[]).unwrap();
            (d.integrate() - exact).norm()
        };
        let ratio = err(100) / err(200);
        assert!(
            (ratio - 4.0).abs() < 0.3,
            "refinement ratio {ratio}, expected ~4"
        );
    }

    #[test]
    fn moment_of_point_mass() {
        let grid = TimeGrid::new(4.0, 40).unwrap();
        let d = AmplitudeDistribution::new(
            grid,
            vec![Complex64::ZERO; grid.len()],
            &[(SingularPoint::End, cx(1.0, 0.0))],
        )
        .unwrap();
        assert_eq!(d.moment(1, false).unwrap(), cx(4.0, 0.0));
        assert_eq!(d.moment(0, false).unwrap(), cx(1.0, 0.0));
        assert_eq!(d.moment(1, true).unwrap(), cx(4.0, 0.0));
    }

    #[test]
    fn moment_rejects_near_zero_normalization() {
        let grid = TimeGrid::new(1.0, 10).unwrap();
        let d = AmplitudeDistribution::new(
            grid,
            vec![cx(1e-14, 0.0); grid.len()],
            &[],
        )
        .unwrap();
        assert!(matches!(
            d.moment(1, true),
            Err(Error::NearZeroNormalization { .. })
        ));
    }

    #[test]
    fn convolve_point_mass_is_analytic_gaussian() {
        let grid = TimeGrid::new(10.0, 400).unwrap();
        let alpha = 2.0;
        let d = AmplitudeDistribution::new(
            grid,
            vec![Complex64::ZERO; grid.len()],
            &[(SingularPoint::End, cx(1.0, 0.0))],
        )
        .unwrap();
        let out = d.gauss_convolve(alpha).unwrap();
        for (j, z) in out.density().iter().enumerate() {
            let expect = (-alpha * alpha * (grid.tau(j) - 10.0).powi(2)).exp();
            assert!((z - cx(expect, 0.0)).norm() < 1e-15);
        }
        assert_eq!(out.singular_weight(SingularPoint::End), Complex64::ZERO);
    }

    #[test]
    fn convolve_zero_is_zero() {
        let grid = TimeGrid::new(5.0, 200).unwrap();
        let out = AmplitudeDistribution::zero(grid).gauss_convolve(1.0).unwrap();
        assert!(out.density().iter().all(|z| *z == Complex64::ZERO));
    }

    #[test]
    fn convolve_reports_coarse_grid() {
        let grid = TimeGrid::new(10.0, 20).unwrap(); // spacing 0.5
        let d = AmplitudeDistribution::zero(grid);
        assert!(matches!(
            d.gauss_convolve(1.0), // width 1.0, need spacing <= 0.25
            Err(Error::GridResolution { .. })
        ));
    }

    #[test]
    fn csv_layout() {
        let grid = TimeGrid::new(1.0, 2).unwrap();
        let d = AmplitudeDistribution::new(
            grid,
            vec![cx(0.0, 0.0), cx(1.0, -1.0), cx(0.0, 0.0)],
            &[(SingularPoint::End, cx(0.5, 0.0))],
        )
        .unwrap();
        let mut buf = Vec::new();
        d.write_csv(&mut buf).unwrap();
        let text = String::from_utf8(buf).unwrap();
        let mut lines = text.lines();
        assert!(lines.next().unwrap().starts_with("# singular: t=1"));
        assert_eq!(lines.next().unwrap(), "tau,re_density,im_density");
        assert_eq!(text.lines().count(), 5);
    }

    proptest! {
        #[test]
        fn convolve_is_linear(scale in -3.0f64..3.0, seed in 0u64..1000) {
            let grid = TimeGrid::new(4.0, 64).unwrap();
            // two deterministic pseudo-random densities from the seed
            let mk = |salt: u64| -> Vec<Complex64> {
                (0..grid.len())
                    .map(|j| {
                        let x = ((j as u64 + 1) * (seed + salt * 7919 + 1)) as f64;
                        cx((x * 0.61803).fract() - 0.5, (x * 0.41421).fract() - 0.5)
                    })
                    .collect()
            };
            let d1 = AmplitudeDistribution::new(
                grid, mk(1), &[(SingularPoint::Origin, cx(0.3, 0.1))]).unwrap();
            let d2 = AmplitudeDistribution::new(
                grid, mk(2), &[(SingularPoint::End, cx(-0.2, 0.4))]).unwrap();
            let combo_density: Vec<Complex64> = d1
                .density()
                .iter()
                .zip(d2.density())
                .map(|(a, b)| a * scale + b)
                .collect();
            let combo = AmplitudeDistribution::new(
                grid,
                combo_density,
                &[
                    (SingularPoint::Origin, d1.singular_weight(SingularPoint::Origin) * scale),
                    (SingularPoint::End, d2.singular_weight(SingularPoint::End)),
                ],
            ).unwrap();
            let lhs = combo.gauss_convolve(1.5).unwrap();
            let c1 = d1.gauss_convolve(1.5).unwrap();
            let c2 = d2.gauss_convolve(1.5).unwrap();
            for j in 0..grid.len() {
                let rhs = c1.density()[j] * scale + c2.density()[j];
                prop_assert!((lhs.density()[j] - rhs).norm() < 1e-12);
            }
        }
    }
}
