//! Complex scalar fields on a periodic grid.

use num_complex::Complex;

use crate::error::{Error, Result};
use crate::grid::GridSpec;
use crate::scalar::{cis, Real};

/// Which representation the stored array currently holds.
#[derive(Clone, Copy, Debug, PartialEq, Eq, serde::Serialize, serde::Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Side {
    Frequency,
    Physical,
}

/// Complex field on a [`GridSpec`], stored either as Fourier-series amplitudes
/// or as nodal values. Operations never mutate their inputs.
#[derive(Clone, Debug)]
pub struct SpectralField<T: Real> {
    grid: GridSpec<T>,
    data: Vec<Complex<T>>,
    side: Side,
}

pub(crate) fn czero<T: Real>() -> Complex<T> {
    Complex::new(T::zero(), T::zero())
}

impl<T: Real> SpectralField<T> {
    pub fn zeros(grid: &GridSpec<T>) -> Self {
        Self { grid: grid.clone(), data: vec![czero(); grid.len()], side: Side::Frequency }
    }

    /// Wraps an array of Fourier-series amplitudes (flat FFT index order).
    pub fn from_frequency(grid: &GridSpec<T>, data: Vec<Complex<T>>) -> Result<Self> {
        Self::from_parts(grid, data, Side::Frequency)
    }

    /// Wraps an array of nodal values.
    pub fn from_physical(grid: &GridSpec<T>, data: Vec<Complex<T>>) -> Result<Self> {
        Self::from_parts(grid, data, Side::Physical)
    }

    pub fn from_parts(grid: &GridSpec<T>, data: Vec<Complex<T>>, side: Side) -> Result<Self> {
        if data.len() != grid.len() {
            return Err(Error::InvalidGrid(format!(
                "array of length {} does not match N^3 = {}",
                data.len(),
                grid.len()
            )));
        }
        Ok(Self { grid: grid.clone(), data, side })
    }

    /// Samples `f` at the (wrapped) grid nodes.
    pub fn from_fn(grid: &GridSpec<T>, f: impl Fn([T; 3]) -> Complex<T>) -> Self {
        let data = (0..grid.len()).map(|i| f(grid.position(i))).collect();
        Self { grid: grid.clone(), data, side: Side::Physical }
    }

    /// Builds a field from a function of the frequency vector.
    pub fn from_symbol(grid: &GridSpec<T>, f: impl Fn([T; 3]) -> Complex<T>) -> Self {
        let data = (0..grid.len()).map(|i| f(grid.xi(i))).collect();
        Self { grid: grid.clone(), data, side: Side::Frequency }
    }

    /// `amp * e^{i xi.x}` with `xi = dk * m`.
    pub fn plane_wave(grid: &GridSpec<T>, m: [i64; 3], amp: Complex<T>) -> Self {
        let mut f = Self::zeros(grid);
        f.data[grid.lattice_index(m)] = amp;
        f
    }

    pub fn grid(&self) -> &GridSpec<T> {
        &self.grid
    }

    pub fn side(&self) -> Side {
        self.side
    }

    /// Raw array in the current representation.
    pub fn data(&self) -> &[Complex<T>] {
        &self.data
    }

    pub fn into_parts(self) -> (GridSpec<T>, Vec<Complex<T>>, Side) {
        (self.grid, self.data, self.side)
    }

    pub fn to_frequency(&self) -> Self {
        match self.side {
            Side::Frequency => self.clone(),
            Side::Physical => {
                let mut data = self.data.clone();
                self.grid.forward(&mut data);
                Self { grid: self.grid.clone(), data, side: Side::Frequency }
            }
        }
    }

    pub fn to_physical(&self) -> Self {
        match self.side {
            Side::Physical => self.clone(),
            Side::Frequency => {
                let mut data = self.data.clone();
                self.grid.inverse(&mut data);
                Self { grid: self.grid.clone(), data, side: Side::Physical }
            }
        }
    }

    pub fn into_frequency(self) -> Self {
        match self.side {
            Side::Frequency => self,
            Side::Physical => {
                let Self { grid, mut data, .. } = self;
                grid.forward(&mut data);
                Self { grid, data, side: Side::Frequency }
            }
        }
    }

    pub fn into_physical(self) -> Self {
        match self.side {
            Side::Physical => self,
            Side::Frequency => {
                let Self { grid, mut data, .. } = self;
                grid.inverse(&mut data);
                Self { grid, data, side: Side::Physical }
            }
        }
    }

    /// Fourier-series amplitudes (copy if the field is physical).
    pub fn coefficients(&self) -> Vec<Complex<T>> {
        self.to_frequency().data
    }

    /// Nodal values (copy if the field is in frequency form).
    pub fn values(&self) -> Vec<Complex<T>> {
        self.to_physical().data
    }

    pub fn ensure_same_grid(&self, other: &Self) -> Result<()> {
        if self.grid == other.grid {
            Ok(())
        } else {
            Err(Error::GridMismatch)
        }
    }

    /// `L^2` norm, computed in whichever representation is stored.
    pub fn norm_l2(&self) -> T {
        let s: T = self.data.iter().map(|z| z.norm_sqr()).sum();
        match self.side {
            Side::Frequency => (s * self.grid.volume()).sqrt(),
            Side::Physical => (s * self.grid.dx().powi(3)).sqrt(),
        }
    }

    /// Grid-quadrature `L^q` norm; `q = inf` gives the nodal maximum.
    pub fn norm_lq(&self, q: T) -> T {
        let vals = self.values();
        lq_of_values(&vals, q, self.grid.dx().powi(3))
    }

    /// `||<grad> f||_{L^2}`.
    pub fn norm_h1(&self) -> T {
        let a = self.coefficients();
        let s: T = a
            .iter()
            .zip(self.grid.xi_abs_table())
            .map(|(z, &k)| z.norm_sqr() * (T::one() + k * k))
            .sum();
        (s * self.grid.volume()).sqrt()
    }

    /// `||grad f||_{L^2}`.
    pub fn norm_grad(&self) -> T {
        let a = self.coefficients();
        let s: T = a
            .iter()
            .zip(self.grid.xi_abs_table())
            .map(|(z, &k)| z.norm_sqr() * k * k)
            .sum();
        (s * self.grid.volume()).sqrt()
    }

    /// Grid quadrature of the nodal values, `dx^3 sum f(x)`.
    pub fn integral(&self) -> Complex<T> {
        match self.side {
            Side::Frequency => self.data[0] * self.grid.volume(),
            Side::Physical => {
                let s = self.data.iter().fold(czero::<T>(), |a, &b| a + b);
                s * self.grid.dx().powi(3)
            }
        }
    }

    /// Relative `L^2` distance `||self - other|| / ||other||`.
    pub fn rel_l2_dist(&self, other: &Self) -> T {
        let d = self.sub(other).norm_l2();
        let r = other.norm_l2();
        if r == T::zero() {
            d
        } else {
            d / r
        }
    }

    fn zip_with(&self, other: &Self, op: impl Fn(Complex<T>, Complex<T>) -> Complex<T>) -> Self {
        assert!(self.grid == other.grid, "fields live on different grids");
        let b = if other.side == self.side {
            std::borrow::Cow::Borrowed(&other.data)
        } else {
            match self.side {
                Side::Frequency => std::borrow::Cow::Owned(other.coefficients()),
                Side::Physical => std::borrow::Cow::Owned(other.values()),
            }
        };
        let data = self.data.iter().zip(b.iter()).map(|(&x, &y)| op(x, y)).collect();
        Self { grid: self.grid.clone(), data, side: self.side }
    }

    /// Panics on mismatched grids; use [`Self::ensure_same_grid`] at API boundaries.
    pub fn add(&self, other: &Self) -> Self {
        self.zip_with(other, |a, b| a + b)
    }

    pub fn sub(&self, other: &Self) -> Self {
        self.zip_with(other, |a, b| a - b)
    }

    /// `self + c * other`.
    pub fn axpy(&self, c: Complex<T>, other: &Self) -> Self {
        self.zip_with(other, |a, b| a + b * c)
    }

    pub fn scale(&self, c: Complex<T>) -> Self {
        self.map(|z| z * c)
    }

    pub fn scale_re(&self, c: T) -> Self {
        self.map(|z| z * c)
    }

    /// Applies `op` to every stored entry (representation unchanged).
    pub fn map(&self, op: impl Fn(Complex<T>) -> Complex<T>) -> Self {
        Self { grid: self.grid.clone(), data: self.data.iter().map(|&z| op(z)).collect(), side: self.side }
    }

    /// Pointwise physical product (aliased collocation).
    pub fn mul(&self, other: &Self) -> Self {
        let a = self.to_physical();
        a.zip_with(other, |x, y| x * y)
    }

    /// Pointwise map of nodal values.
    pub fn map_physical(&self, op: impl Fn(Complex<T>) -> Complex<T>) -> Self {
        self.to_physical().map(op)
    }

    /// Complex conjugate of the function (not of the coefficients).
    pub fn conj(&self) -> Self {
        self.map_physical(|z| z.conj())
    }

    /// Real part as a complex field.
    pub fn re(&self) -> Self {
        self.map_physical(|z| Complex::new(z.re, T::zero()))
    }

    /// `|f|^2` as a complex field.
    pub fn abs_sq(&self) -> Self {
        self.map_physical(|z| Complex::new(z.norm_sqr(), T::zero()))
    }

    /// Coefficient-wise multiplication by a function of the lattice vector.
    pub fn apply_symbol(&self, m: impl Fn(usize) -> Complex<T>) -> Self {
        let mut f = self.to_frequency();
        for (i, z) in f.data.iter_mut().enumerate() {
            *z = *z * m(i);
        }
        f
    }

    /// Multiplies the coefficient at `xi` by `m(|xi|)`.
    ///
    /// `at_zero` is the value at `xi = 0`. When it is `None` the symbol is taken
    /// as undefined there: the zero mode is set to 0 if it is negligible
    /// (below `1e-12` relative, `1e-6` in single precision), otherwise a
    /// [`Error::SingularMultiplier`] is returned.
    pub fn apply_radial_multiplier(
        &self,
        m: impl Fn(T) -> Complex<T>,
        at_zero: Option<Complex<T>>,
    ) -> Result<Self> {
        let mut f = self.to_frequency();
        let table = self.grid.xi_abs_table();
        let z0 = f.data[0];
        match at_zero {
            Some(v) => f.data[0] = z0 * v,
            None => {
                let scale = f.data.iter().map(|z| z.norm_sqr()).sum::<T>().sqrt();
                if z0.norm() > T::tiny() * scale.max(T::min_positive_value()) {
                    return Err(Error::SingularMultiplier(z0.norm().as_f64()));
                }
                f.data[0] = czero();
            }
        }
        for (z, &k) in f.data.iter_mut().zip(table).skip(1) {
            *z = *z * m(k);
        }
        Ok(f)
    }

    /// `e^{it Delta} f`: multiplies by `e^{-it|xi|^2}`.
    pub fn schrodinger_propagate(&self, t: T) -> Self {
        let table = self.grid.xi_abs_table();
        let mut f = self.to_frequency();
        for (z, &k) in f.data.iter_mut().zip(table) {
            *z = *z * cis(-t * k * k);
        }
        f
    }

    /// `e^{i alpha t |grad|} f`: multiplies by `e^{i alpha t |xi|}`.
    pub fn half_wave_propagate(&self, t: T, alpha: T) -> Result<Self> {
        if !(alpha > T::zero()) {
            return Err(Error::InvalidParameter(format!("wave speed must be positive, got {alpha}")));
        }
        let table = self.grid.xi_abs_table();
        let mut f = self.to_frequency();
        for (z, &k) in f.data.iter_mut().zip(table) {
            *z = *z * cis(alpha * t * k);
        }
        Ok(f)
    }

    /// `|grad| f`.
    pub fn abs_grad(&self) -> Self {
        self.apply_radial_multiplier(|k| Complex::new(k, T::zero()), Some(czero()))
            .expect("defined at zero")
    }

    /// `<grad> f`.
    pub fn japanese(&self) -> Self {
        self.apply_radial_multiplier(
            |k| Complex::new((T::one() + k * k).sqrt(), T::zero()),
            Some(Complex::new(T::one(), T::zero())),
        )
        .expect("defined at zero")
    }

    /// Partial derivative along `axis`; the unmatched `-N/2` mode is zeroed.
    pub fn partial(&self, axis: usize) -> Self {
        let g = self.grid.clone();
        let h = (g.n() / 2) as i64;
        let dk = g.dk();
        self.apply_symbol(|i| {
            let m = g.lattice(i)[axis];
            if m == -h {
                czero()
            } else {
                Complex::new(T::zero(), T::of(m as f64) * dk)
            }
        })
    }

    /// Casts to another precision.
    pub fn cast<U: Real>(&self, grid: &GridSpec<U>) -> Result<SpectralField<U>> {
        if grid.n() != self.grid.n() {
            return Err(Error::GridMismatch);
        }
        let data = self
            .data
            .iter()
            .map(|z| Complex::new(U::of(z.re.as_f64()), U::of(z.im.as_f64())))
            .collect();
        SpectralField::from_parts(grid, data, self.side)
    }

    /// Largest coefficient magnitude; used to detect non-finite states.
    pub fn is_finite(&self) -> bool {
        self.data.iter().all(|z| z.re.is_finite() && z.im.is_finite())
    }
}

/// `(w sum |f|^q)^{1/q}`, or the maximum for infinite `q`.
pub fn lq_of_values<T: Real>(vals: &[Complex<T>], q: T, w: T) -> T {
    if q.is_infinite() {
        vals.iter().map(|z| z.norm()).fold(T::zero(), T::max)
    } else {
        let s: T = vals.iter().map(|z| z.norm().powf(q)).sum();
        (s * w).powf(T::one() / q)
    }
}
