//! Landweber direct sampling: `F#`, noise, filter, surrogate polynomial and
//! the imaging function
//!
//! ```text
//! Gamma_r(t) = (1 - (1 - beta t)^r) / sqrt(t),   Gamma_r(0) = 0
//! P(t)       = sum_{m=1}^{M} c_m t^m
//! W(z)       = || P(F#) phi_z ||^p,   phi_z = (e^{-ik x_i . z})_i
//! ```

use std::io::Write;
use std::path::Path;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha20Rng;
use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::farfield::FarFieldMatrix;
use crate::geometry::Point;
use crate::linops::{
    cutoff_least_squares, hermitian_eig, norm2, spectral_norm, ComplexMatrix, HermitianEigensystem,
    EIG_TOLERANCE,
};
use crate::quadrature::gauss_legendre;
use crate::scalar::{cis, Cx, Real};

/// Relative band below zero inside which eigenvalues of `F#` are clamped.
pub const PSD_BAND: f64 = 1e-10;
/// Default relative singular-value cut-off of the polynomial fit.
pub const DEFAULT_CUTOFF: f64 = 1e-8;
pub const DEFAULT_DEGREE: usize = 4;
/// `beta = BETA_FRACTION / lambda_1` unless configured otherwise.
pub const DEFAULT_BETA_FRACTION: f64 = 0.9;
pub const DEFAULT_EXPONENT: i32 = 4;
pub const EQUISPACED_NODES: usize = 100;
pub const GAUSS_NODES: usize = 32;

/// Norm used to normalize the noise matrix.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum NoiseNorm {
    #[default]
    Spectral,
    Frobenius,
}

#[derive(Debug, Clone, PartialEq)]
pub struct NoisyData<T> {
    pub far_field: FarFieldMatrix<T>,
    /// The normalized noise matrix `E`.
    pub noise: ComplexMatrix<T>,
}

/// Uniform complex matrix with real and imaginary parts on `[-1, 1]`,
/// normalized to unit norm. Entries are drawn row-major, real part first.
pub fn noise_matrix<T: Real>(n: usize, seed: u64, norm: NoiseNorm) -> ComplexMatrix<T> {
    let mut rng = ChaCha20Rng::seed_from_u64(seed);
    let e = ComplexMatrix::from_fn(n, n, |_, _| {
        let a: f64 = rng.gen_range(-1.0..=1.0);
        let b: f64 = rng.gen_range(-1.0..=1.0);
        Cx::new(T::lit(a), T::lit(b))
    });
    let scale = match norm {
        NoiseNorm::Spectral => spectral_norm(&e),
        NoiseNorm::Frobenius => e.frobenius_norm(),
    };
    e.map(|v| v / scale)
}

/// `F_ij (1 + delta E_ij)`.
pub fn add_noise<T: Real>(
    ff: &FarFieldMatrix<T>,
    delta: T,
    seed: u64,
    norm: NoiseNorm,
) -> Result<NoisyData<T>> {
    if !(delta >= T::zero() && delta < T::one()) {
        return Err(Error::Parameter(format!("noise level must lie in [0, 1), got {delta}")));
    }
    let n = ff.n();
    let noise = noise_matrix::<T>(n, seed, norm);
    let entries = ComplexMatrix::from_fn(n, n, |i, j| {
        ff.entries[(i, j)] * (Cx::new(T::one(), T::zero()) + noise[(i, j)] * delta)
    });
    Ok(NoisyData {
        far_field: FarFieldMatrix::new(ff.k, entries)?,
        noise,
    })
}

/// `|Re F| + |Im F|` with its eigensystem. Eigenvalues are descending and
/// clamped to be non-negative.
#[derive(Debug, Clone, PartialEq)]
pub struct FSharp<T> {
    pub matrix: ComplexMatrix<T>,
    pub eig: HermitianEigensystem<T>,
    pub lambda1: T,
    /// Smallest eigenvalue before clamping.
    pub raw_min_eigenvalue: T,
}

impl<T: Real> FSharp<T> {
    pub fn dim(&self) -> usize {
        self.matrix.rows()
    }

    /// Builds the operator from an arbitrary PSD Hermitian matrix.
    pub fn from_hermitian(matrix: &ComplexMatrix<T>) -> Result<Self> {
        let matrix = matrix.hermitian_part();
        let mut eig = hermitian_eig(&matrix, T::tol(EIG_TOLERANCE))?;
        let lambda1 = eig.values.first().copied().unwrap_or_else(T::zero);
        let raw_min = eig.values.last().copied().unwrap_or_else(T::zero);
        let floor = -T::lit(PSD_BAND) * lambda1.max(T::zero());
        if raw_min < floor {
            return Err(Error::Parameter(format!(
                "matrix is not positive semidefinite: eigenvalue {raw_min:e} with lambda_1 = {lambda1:e}"
            )));
        }
        for v in eig.values.iter_mut() {
            *v = v.max(T::zero());
        }
        Ok(Self {
            matrix,
            eig,
            lambda1: lambda1.max(T::zero()),
            raw_min_eigenvalue: raw_min,
        })
    }
}

/// `|A|` for Hermitian `A`: absolute eigenvalues, same eigenvectors.
pub fn hermitian_abs<T: Real>(a: &ComplexMatrix<T>) -> Result<ComplexMatrix<T>> {
    Ok(hermitian_eig(a, T::tol(EIG_TOLERANCE))?.reconstruct_with(|l| l.abs()))
}

pub fn build_fsharp<T: Real>(f: &ComplexMatrix<T>) -> Result<FSharp<T>> {
    if !f.is_square() {
        return Err(Error::Dimension(format!(
            "F# needs a square matrix, got {}x{}",
            f.rows(),
            f.cols()
        )));
    }
    let re = hermitian_abs(&f.hermitian_part())?;
    let im = hermitian_abs(&f.skew_hermitian_part())?;
    FSharp::from_hermitian(&re.add(&im)?)
}

/// `Gamma_r(t)`, zero at `t = 0`.
pub fn gamma_filter<T: Real>(t: T, beta: T, r: u32) -> T {
    if t <= T::zero() {
        return T::zero();
    }
    let step = T::one() - beta * t;
    (T::one() - step.powi(r as i32)) / t.sqrt()
}

/// `max(ceil(ln(delta / (beta sqrt(lambda1))) / ln(1 - beta lambda1)), 1)`.
pub fn choose_r<T: Real>(lambda1: T, beta: T, delta: T) -> Result<u32> {
    if !(lambda1 > T::zero() && lambda1.is_finite()) {
        return Err(Error::Parameter(format!("lambda_1 must be positive, got {lambda1}")));
    }
    if !(beta > T::zero() && beta * lambda1 < T::one()) {
        return Err(Error::Parameter(format!(
            "beta must lie in (0, 1/lambda_1) = (0, {}), got {beta}",
            T::one() / lambda1
        )));
    }
    if !(delta > T::zero() && delta < T::one()) {
        return Err(Error::Parameter(format!("delta must lie in (0, 1), got {delta}")));
    }
    let value = (delta / (beta * lambda1.sqrt())).ln() / (T::one() - beta * lambda1).ln();
    let r = value.ceil().max(T::one());
    r.to_u32()
        .ok_or_else(|| Error::Parameter(format!("iteration count {r} out of range")))
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum NodeScheme {
    Equispaced100,
    SingularValues,
    #[default]
    Gauss32,
}

impl NodeScheme {
    pub fn name(&self) -> &'static str {
        match self {
            NodeScheme::Equispaced100 => "equi",
            NodeScheme::SingularValues => "sv",
            NodeScheme::Gauss32 => "gauss",
        }
    }
}

impl std::str::FromStr for NodeScheme {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "equi" | "equispaced" | "equispaced100" => Ok(NodeScheme::Equispaced100),
            "sv" | "singular_values" => Ok(NodeScheme::SingularValues),
            "gauss" | "gauss32" => Ok(NodeScheme::Gauss32),
            other => Err(Error::Parameter(format!(
                "unknown node scheme `{other}` (expected equi, sv or gauss)"
            ))),
        }
    }
}

/// `count` equally spaced points on `[0, upper]`, endpoints included.
pub fn equispaced_nodes<T: Real>(upper: T, count: usize) -> Vec<T> {
    if count == 1 {
        return vec![upper];
    }
    let last = T::from_usize_lossy(count - 1);
    (0..count)
        .map(|l| upper * T::from_usize_lossy(l) / last)
        .collect()
}

/// Gauss-Legendre nodes mapped to `[0, upper]`.
pub fn gauss_nodes<T: Real>(upper: T, count: usize) -> Vec<T> {
    gauss_legendre::<T>(count).nodes.into_iter().map(|x| x * upper).collect()
}

/// Fit nodes on `[0, lambda_1]`. The eigenvalue scheme keeps eigenvalues
/// `>= cutoff * lambda_1`, in descending order.
pub fn interpolation_nodes<T: Real>(scheme: NodeScheme, fsharp: &FSharp<T>, cutoff: T) -> Vec<T> {
    let s1 = fsharp.lambda1;
    match scheme {
        NodeScheme::Equispaced100 => equispaced_nodes(s1, EQUISPACED_NODES),
        NodeScheme::Gauss32 => gauss_nodes(s1, GAUSS_NODES),
        NodeScheme::SingularValues => fsharp
            .eig
            .values
            .iter()
            .copied()
            .filter(|&l| l > T::zero() && l >= cutoff * s1)
            .collect(),
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct FilterSpec<T> {
    pub beta: T,
    pub r: u32,
    /// Noise level the iteration count was chosen for.
    pub delta: T,
    pub scheme: NodeScheme,
    pub degree: usize,
    pub cutoff: T,
}

impl<T: Real> FilterSpec<T> {
    pub fn new(beta: T, r: u32, delta: T, scheme: NodeScheme, degree: usize, cutoff: T) -> Result<Self> {
        if !(beta > T::zero() && beta.is_finite()) {
            return Err(Error::Parameter(format!("beta must be positive, got {beta}")));
        }
        if r == 0 {
            return Err(Error::Parameter("iteration count r must be >= 1".into()));
        }
        if degree == 0 {
            return Err(Error::Parameter("polynomial degree must be >= 1".into()));
        }
        if !(delta >= T::zero() && delta < T::one()) {
            return Err(Error::Parameter(format!("delta must lie in [0, 1), got {delta}")));
        }
        if !(cutoff >= T::zero() && cutoff < T::one()) {
            return Err(Error::Parameter(format!("cut-off must lie in [0, 1), got {cutoff}")));
        }
        Ok(Self { beta, r, delta, scheme, degree, cutoff })
    }

    /// `beta = beta_fraction / lambda_1` and `r` from the discrepancy rule.
    pub fn from_data(
        fsharp: &FSharp<T>,
        delta: T,
        beta_fraction: T,
        scheme: NodeScheme,
        degree: usize,
    ) -> Result<Self> {
        let lambda1 = fsharp.lambda1;
        if !(lambda1 > T::zero()) {
            return Err(Error::Parameter("F# vanishes; nothing to image".into()));
        }
        if !(beta_fraction > T::zero() && beta_fraction < T::one()) {
            return Err(Error::Parameter(format!(
                "beta fraction must lie in (0, 1), got {beta_fraction}"
            )));
        }
        let beta = beta_fraction / lambda1;
        let r = choose_r(lambda1, beta, delta)?;
        Self::new(beta, r, delta, scheme, degree, T::lit(DEFAULT_CUTOFF))
    }

    pub fn gamma(&self, t: T) -> T {
        gamma_filter(t, self.beta, self.r)
    }
}

/// `P(t) = sum_{m=1}^{M} c_m t^m`.
#[derive(Debug, Clone, PartialEq)]
pub struct FilterPolynomial<T> {
    /// `c_1 ..= c_M`.
    pub coefficients: Vec<T>,
    pub spec: FilterSpec<T>,
    /// Nonzero nodes used in the fit.
    pub nodes: Vec<T>,
    pub max_node_residual: T,
    pub rank: usize,
}

impl<T: Real> FilterPolynomial<T> {
    pub fn from_coefficients(coefficients: Vec<T>, spec: FilterSpec<T>) -> Self {
        Self {
            coefficients,
            spec,
            nodes: Vec::new(),
            max_node_residual: T::zero(),
            rank: 0,
        }
    }

    pub fn degree(&self) -> usize {
        self.coefficients.len()
    }

    pub fn eval(&self, t: T) -> T {
        let inner = self
            .coefficients
            .iter()
            .rev()
            .fold(T::zero(), |acc, &c| acc * t + c);
        inner * t
    }

    /// `sup |P - Gamma_r|` over `samples` equispaced points of `[0, upper]`.
    pub fn dense_residual(&self, upper: T, samples: usize) -> T {
        equispaced_nodes(upper, samples.max(2))
            .into_iter()
            .map(|t| (self.eval(t) - self.spec.gamma(t)).abs())
            .fold(T::zero(), T::max)
    }
}

/// Least-squares fit of `Gamma_r` on `nodes` in the variable `t / scale`.
pub fn fit_on_nodes<T: Real>(spec: &FilterSpec<T>, nodes: &[T], scale: T) -> Result<FilterPolynomial<T>> {
    if !(scale > T::zero() && scale.is_finite()) {
        return Err(Error::Fit(format!("node scale must be positive, got {scale}")));
    }
    let used: Vec<T> = nodes.iter().copied().filter(|&t| t > T::zero()).collect();
    let mut distinct = used.clone();
    distinct.sort_by(|a, b| a.partial_cmp(b).expect("finite nodes"));
    distinct.dedup();
    let m = spec.degree;
    if distinct.len() < m {
        return Err(Error::Fit(format!(
            "{} distinct nonzero nodes for degree {m}",
            distinct.len()
        )));
    }
    let v = ComplexMatrix::from_fn(used.len(), m, |l, col| {
        Cx::new((used[l] / scale).powi(col as i32 + 1), T::zero())
    });
    let y: Vec<Cx<T>> = used.iter().map(|&t| Cx::new(spec.gamma(t), T::zero())).collect();
    let sol = cutoff_least_squares(&v, &y, spec.cutoff)?;
    if sol.all_cut {
        return Err(Error::Fit("every singular value fell below the cut-off".into()));
    }
    let coefficients: Vec<T> = sol
        .x
        .iter()
        .enumerate()
        .map(|(col, c)| c.re / scale.powi(col as i32 + 1))
        .collect();
    let mut poly = FilterPolynomial {
        coefficients,
        spec: *spec,
        nodes: used,
        max_node_residual: T::zero(),
        rank: sol.rank,
    };
    poly.max_node_residual = poly
        .nodes
        .iter()
        .map(|&t| (poly.eval(t) - spec.gamma(t)).abs())
        .fold(T::zero(), T::max);
    Ok(poly)
}

pub fn fit_filter_polynomial<T: Real>(spec: &FilterSpec<T>, fsharp: &FSharp<T>) -> Result<FilterPolynomial<T>> {
    let nodes = interpolation_nodes(spec.scheme, fsharp, spec.cutoff);
    fit_on_nodes(spec, &nodes, fsharp.lambda1)
}

/// `sum_j P(lambda_j) (v, psi_j) psi_j`.
pub fn apply_polynomial<T: Real>(
    fsharp: &FSharp<T>,
    poly: &FilterPolynomial<T>,
    v: &[Cx<T>],
) -> Result<Vec<Cx<T>>> {
    let coef = fsharp.eig.coefficients(v)?;
    let scaled: Vec<Cx<T>> = coef
        .iter()
        .zip(&fsharp.eig.values)
        .map(|(c, &l)| *c * poly.eval(l))
        .collect();
    fsharp.eig.vectors.matvec(&scaled)
}

/// `P(F#)` as a dense matrix.
pub fn polynomial_matrix<T: Real>(fsharp: &FSharp<T>, poly: &FilterPolynomial<T>) -> ComplexMatrix<T> {
    fsharp.eig.reconstruct_with(|l| poly.eval(l))
}

/// `(e^{-ik x_i . z})_i`.
pub fn phi_z<T: Real>(k: T, dirs: &[Point<T>], z: Point<T>) -> Vec<Cx<T>> {
    dirs.iter()
        .map(|d| cis(-k * (d[0] * z[0] + d[1] * z[1])))
        .collect()
}

fn check_exponent(exponent: i32) -> Result<()> {
    if exponent < 1 {
        return Err(Error::Parameter(format!("exponent must be >= 1, got {exponent}")));
    }
    Ok(())
}

/// `|| P(F#) phi_z ||^exponent`.
pub fn imaging_value<T: Real>(
    fsharp: &FSharp<T>,
    poly: &FilterPolynomial<T>,
    k: T,
    dirs: &[Point<T>],
    z: Point<T>,
    exponent: i32,
) -> Result<T> {
    check_exponent(exponent)?;
    let v = apply_polynomial(fsharp, poly, &phi_z(k, dirs, z))?;
    Ok(norm2(&v).powi(exponent))
}

/// Rectangle `[x0, x1] x [y0, y1]`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Region<T> {
    pub x0: T,
    pub x1: T,
    pub y0: T,
    pub y1: T,
}

impl<T: Real> Region<T> {
    pub fn new(x0: T, x1: T, y0: T, y1: T) -> Result<Self> {
        let ok = |a: T, b: T| a.is_finite() && b.is_finite() && a < b;
        if !(ok(x0, x1) && ok(y0, y1)) {
            return Err(Error::Parameter(format!(
                "empty imaging region [{x0}, {x1}] x [{y0}, {y1}]"
            )));
        }
        Ok(Self { x0, x1, y0, y1 })
    }
}

impl Default for Region<f64> {
    fn default() -> Self {
        Self { x0: -3.0, x1: 3.0, y0: -3.0, y1: 3.0 }
    }
}

pub const DEFAULT_RESOLUTION: usize = 100;

/// Imaging values on a tensor grid, row-major with `y` as the slow index.
#[derive(Debug, Clone, PartialEq)]
pub struct ImagingGrid<T> {
    pub region: Region<T>,
    pub resolution: usize,
    pub values: Vec<T>,
}

impl<T: Real> ImagingGrid<T> {
    fn coord(a: T, b: T, i: usize, res: usize) -> T {
        a + (b - a) * T::from_usize_lossy(i) / T::from_usize_lossy(res - 1)
    }

    pub fn x(&self, i: usize) -> T {
        Self::coord(self.region.x0, self.region.x1, i, self.resolution)
    }

    pub fn y(&self, j: usize) -> T {
        Self::coord(self.region.y0, self.region.y1, j, self.resolution)
    }

    /// Value at column `i`, row `j`.
    pub fn value(&self, i: usize, j: usize) -> T {
        self.values[j * self.resolution + i]
    }

    /// `(point, value)` in storage order.
    pub fn points(&self) -> impl Iterator<Item = (Point<T>, T)> + '_ {
        self.values.iter().enumerate().map(move |(idx, &w)| {
            let (j, i) = (idx / self.resolution, idx % self.resolution);
            ([self.x(i), self.y(j)], w)
        })
    }

    pub fn max(&self) -> T {
        self.values.iter().copied().fold(T::zero(), T::max)
    }

    /// First grid point attaining the maximum.
    pub fn argmax(&self) -> Point<T> {
        let mut best = (self.points().next().expect("grid is nonempty").0, -T::one());
        for (p, w) in self.points() {
            if w > best.1 {
                best = (p, w);
            }
        }
        best.0
    }

    /// The `fraction` of grid points with the largest values.
    pub fn top_points(&self, fraction: f64) -> Vec<Point<T>> {
        let mut all: Vec<(Point<T>, T)> = self.points().collect();
        all.sort_by(|a, b| b.1.partial_cmp(&a.1).expect("finite image"));
        let count = ((all.len() as f64 * fraction).ceil() as usize).clamp(1, all.len());
        all.into_iter().take(count).map(|(p, _)| p).collect()
    }

    /// Values divided by the global maximum.
    pub fn normalized(&self) -> Vec<T> {
        let m = self.max();
        if m > T::zero() {
            self.values.iter().map(|&w| w / m).collect()
        } else {
            vec![T::zero(); self.values.len()]
        }
    }

    pub fn write_csv(&self, mut w: impl Write) -> Result<()> {
        writeln!(w, "x,y,w")?;
        for (p, v) in self.points() {
            let f = |x: T| x.to_f64().unwrap_or(f64::NAN);
            writeln!(w, "{:.16e},{:.16e},{:.16e}", f(p[0]), f(p[1]), f(v))?;
        }
        Ok(())
    }

    /// 8-bit `P2` heatmap scaled by the global maximum, top row at `y1`.
    pub fn write_pgm(&self, mut w: impl Write) -> Result<()> {
        let res = self.resolution;
        let norm = self.normalized();
        writeln!(w, "P2")?;
        writeln!(w, "{res} {res}")?;
        writeln!(w, "255")?;
        for j in (0..res).rev() {
            let row: Vec<String> = (0..res)
                .map(|i| {
                    let v = norm[j * res + i].to_f64().unwrap_or(0.0);
                    ((v * 255.0).round().clamp(0.0, 255.0) as u8).to_string()
                })
                .collect();
            writeln!(w, "{}", row.join(" "))?;
        }
        Ok(())
    }

    pub fn save_csv(&self, path: impl AsRef<Path>) -> Result<()> {
        let mut w = std::io::BufWriter::new(std::fs::File::create(path)?);
        self.write_csv(&mut w)?;
        w.flush()?;
        Ok(())
    }

    pub fn save_pgm(&self, path: impl AsRef<Path>) -> Result<()> {
        let mut w = std::io::BufWriter::new(std::fs::File::create(path)?);
        self.write_pgm(&mut w)?;
        w.flush()?;
        Ok(())
    }
}

/// Evaluates `W` on a `resolution x resolution` grid. Rows are computed in
/// parallel; every value depends only on its own grid point.
pub fn imaging_grid<T: Real>(
    fsharp: &FSharp<T>,
    poly: &FilterPolynomial<T>,
    k: T,
    dirs: &[Point<T>],
    region: Region<T>,
    resolution: usize,
    exponent: i32,
) -> Result<ImagingGrid<T>> {
    check_exponent(exponent)?;
    if resolution < 2 {
        return Err(Error::Parameter(format!("grid resolution must be >= 2, got {resolution}")));
    }
    if dirs.len() != fsharp.dim() {
        return Err(Error::Dimension(format!(
            "{} directions for a {}x{} operator",
            dirs.len(),
            fsharp.dim(),
            fsharp.dim()
        )));
    }
    let op = polynomial_matrix(fsharp, poly);
    let mut grid = ImagingGrid { region, resolution, values: Vec::new() };
    let rows: Vec<Vec<T>> = (0..resolution)
        .into_par_iter()
        .map(|j| {
            let y = grid.y(j);
            (0..resolution)
                .map(|i| {
                    let v = op.matvec(&phi_z(k, dirs, [grid.x(i), y])).expect("dimensions checked");
                    norm2(&v).powi(exponent)
                })
                .collect()
        })
        .collect();
    grid.values = rows.into_iter().flatten().collect();
    Ok(grid)
}

/// Noise, `F#`, filter and polynomial for one far-field data set.
#[derive(Debug, Clone)]
pub struct Reconstruction<T> {
    pub fsharp: FSharp<T>,
    pub poly: FilterPolynomial<T>,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ReconstructionConfig<T> {
    pub delta: T,
    pub seed: u64,
    pub noise_norm: NoiseNorm,
    pub scheme: NodeScheme,
    pub degree: usize,
    pub beta_fraction: T,
    /// Iteration count override. Without noise the discrepancy rule is
    /// undefined and `r` defaults to 1.
    pub r: Option<u32>,
}

impl<T: Real> Default for ReconstructionConfig<T> {
    fn default() -> Self {
        Self {
            delta: T::zero(),
            seed: 0,
            noise_norm: NoiseNorm::Spectral,
            scheme: NodeScheme::default(),
            degree: DEFAULT_DEGREE,
            beta_fraction: T::lit(DEFAULT_BETA_FRACTION),
            r: None,
        }
    }
}

/// Filter spec for `fsharp` following `config`.
pub fn filter_spec<T: Real>(fsharp: &FSharp<T>, config: &ReconstructionConfig<T>) -> Result<FilterSpec<T>> {
    let lambda1 = fsharp.lambda1;
    if !(lambda1 > T::zero()) {
        return Err(Error::Parameter("F# vanishes; nothing to image".into()));
    }
    let mut spec = match (config.r, config.delta > T::zero()) {
        (None, true) => FilterSpec::from_data(
            fsharp,
            config.delta,
            config.beta_fraction,
            config.scheme,
            config.degree,
        )?,
        (r, _) => {
            if !(config.beta_fraction > T::zero() && config.beta_fraction < T::one()) {
                return Err(Error::Parameter(format!(
                    "beta fraction must lie in (0, 1), got {}",
                    config.beta_fraction
                )));
            }
            FilterSpec::new(
                config.beta_fraction / lambda1,
                r.unwrap_or(1),
                config.delta,
                config.scheme,
                config.degree,
                T::lit(DEFAULT_CUTOFF),
            )?
        }
    };
    spec.delta = config.delta;
    Ok(spec)
}

/// Adds noise, builds `F#`, picks `r` and fits the polynomial.
pub fn reconstruct<T: Real>(
    ff: &FarFieldMatrix<T>,
    config: &ReconstructionConfig<T>,
) -> Result<Reconstruction<T>> {
    let noisy = if config.delta > T::zero() {
        add_noise(ff, config.delta, config.seed, config.noise_norm)?.far_field
    } else {
        ff.clone()
    };
    let fsharp = build_fsharp(&noisy.entries)?;
    let spec = filter_spec(&fsharp, config)?;
    let poly = fit_filter_polynomial(&spec, &fsharp)?;
    Ok(Reconstruction { fsharp, poly })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn spec(beta: f64, r: u32, degree: usize) -> FilterSpec<f64> {
        FilterSpec::new(beta, r, 0.1, NodeScheme::Gauss32, degree, DEFAULT_CUTOFF).unwrap()
    }

    #[test]
    fn gamma_values() {
        assert_eq!(gamma_filter(0.0, 0.5, 3), 0.0);
        assert_eq!(gamma_filter(1.0, 1.0, 1), 1.0);
        assert!((gamma_filter(4.0_f64, 0.1, 2) - (1.0 - 0.36) / 2.0).abs() < 1e-15);
    }

    #[test]
    fn choose_r_examples() {
        assert_eq!(choose_r(1.0, 0.5, 0.1).unwrap(), 3);
        assert_eq!(choose_r(4.0, 0.2, 0.05).unwrap(), 2);
        // delta = beta sqrt(lambda1)
        assert_eq!(choose_r(4.0, 0.2, 0.4).unwrap(), 1);
        assert!(choose_r(1.0, 1.0, 0.1).is_err());
        assert!(choose_r(1.0, 0.5, 0.0).is_err());
        assert!(choose_r(1.0, 0.5, 1.0).is_err());
        assert!(choose_r(0.0, 0.5, 0.1).is_err());
    }

    #[test]
    fn fsharp_small_cases() {
        let f = ComplexMatrix::<f64>::identity(2).scale(Cx::new(0.0, 1.0));
        let fs = build_fsharp(&f).unwrap();
        assert!(fs.matrix.sub(&ComplexMatrix::identity(2)).unwrap().max_abs() < 1e-15);
        let fs = build_fsharp(&ComplexMatrix::from_diagonal(&[-2.0, 3.0])).unwrap();
        assert!(fs.matrix.sub(&ComplexMatrix::from_diagonal(&[2.0, 3.0])).unwrap().max_abs() < 1e-15);
        assert_eq!(fs.lambda1, 3.0);
        assert!(build_fsharp(&ComplexMatrix::<f64>::zeros(2, 3)).is_err());
    }

    #[test]
    fn indefinite_input_is_rejected() {
        assert!(FSharp::from_hermitian(&ComplexMatrix::from_diagonal(&[1.0, -0.5])).is_err());
        let fs = FSharp::from_hermitian(&ComplexMatrix::from_diagonal(&[1.0, -1e-12])).unwrap();
        assert_eq!(fs.eig.values[1], 0.0);
        assert_eq!(fs.raw_min_eigenvalue, -1e-12);
    }

    #[test]
    fn node_schemes() {
        let g = gauss_nodes(1.0_f64, 1);
        assert_eq!(g, vec![0.5]);
        let e = equispaced_nodes(2.0_f64, 100);
        assert_eq!(e.len(), 100);
        assert_eq!(e[0], 0.0);
        assert_eq!(e[99], 2.0);
        assert!((e[1] - 2.0 / 99.0).abs() < 1e-16);
        let g = gauss_nodes(3.0_f64, 32);
        for (a, b) in g.iter().zip(g.iter().rev()) {
            assert!((a + b - 3.0).abs() < 1e-14);
        }
        let fs = FSharp::from_hermitian(&ComplexMatrix::from_diagonal(&[2.0, 1.0, 1.0, 1e-12, 0.0])).unwrap();
        assert_eq!(interpolation_nodes(NodeScheme::SingularValues, &fs, 1e-8), vec![2.0, 1.0, 1.0]);
    }

    #[test]
    fn linear_fit_through_one_node() {
        let s = spec(1.0, 1, 1);
        let p = fit_on_nodes(&s, &[1.0], 1.0).unwrap();
        assert!((p.coefficients[0] - 1.0).abs() < 1e-15);
        assert!(p.max_node_residual < 1e-15);
        assert_eq!(p.eval(0.0), 0.0);
    }

    #[test]
    fn square_fit_interpolates() {
        let s = spec(0.4, 3, 4);
        let nodes = [0.3, 0.9, 1.4, 2.0, 0.0];
        let p = fit_on_nodes(&s, &nodes, 2.0).unwrap();
        assert_eq!(p.nodes.len(), 4);
        assert!(p.max_node_residual <= 1e-8, "{}", p.max_node_residual);
    }

    #[test]
    fn degenerate_nodes_fail() {
        let s = spec(0.5, 2, 3);
        assert!(matches!(fit_on_nodes(&s, &[0.5, 0.5, 0.0, 1.0], 1.0), Err(Error::Fit(_))));
        assert!(matches!(fit_on_nodes(&s, &[], 1.0), Err(Error::Fit(_))));
    }

    #[test]
    fn gauss_fit_matches_reference_least_squares() {
        let s = spec(0.5, 3, 4);
        let p = fit_on_nodes(&s, &gauss_nodes(1.0, 32), 1.0).unwrap();
        // LAPACK least squares on the same 32 x 4 Vandermonde system
        let reference = [5.51551868, -14.63240516, 17.18318888, -7.21707089];
        for (c, r) in p.coefficients.iter().zip(reference) {
            assert!((c - r).abs() < 1e-7, "{c} vs {r}");
        }
        // sqrt(t) behaviour at the origin bounds the uniform error from below
        let dense = p.dense_residual(1.0, 2001);
        assert!((dense - 0.105_606_98).abs() < 1e-6, "{dense}");
        assert!((p.max_node_residual - 0.104_627_06).abs() < 1e-6);
    }

    #[test]
    fn scalar_operator_images_are_constant() {
        let c = 2.0;
        let fs = FSharp::from_hermitian(&ComplexMatrix::identity(8).scale(Cx::new(c, 0.0))).unwrap();
        let s = spec(0.3, 2, 2);
        let p = FilterPolynomial::from_coefficients(vec![0.5, -0.1], s);
        let dirs = crate::farfield::directions::<f64>(8);
        let expected = 64.0 * p.eval(c).powi(4);
        for z in [[0.0, 0.0], [1.0, -2.0], [0.3, 0.7]] {
            let w = imaging_value(&fs, &p, 3.0, &dirs, z, 4).unwrap();
            assert!((w - expected).abs() <= 1e-12 * expected);
        }
        let grid = imaging_grid(&fs, &p, 3.0, &dirs, Region::default(), 5, 4).unwrap();
        assert!(grid.values.iter().all(|&w| (w - expected).abs() <= 1e-12 * expected));
    }

    #[test]
    fn zero_operator_images_vanish() {
        let fs = FSharp::from_hermitian(&ComplexMatrix::<f64>::zeros(4, 4)).unwrap();
        let p = FilterPolynomial::from_coefficients(vec![1.0, 2.0], spec(0.3, 1, 2));
        let dirs = crate::farfield::directions::<f64>(4);
        assert_eq!(imaging_value(&fs, &p, 2.0, &dirs, [0.1, 0.2], 4).unwrap(), 0.0);
    }

    #[test]
    fn phi_z_basics() {
        let dirs = crate::farfield::directions::<f64>(16);
        assert!(phi_z(3.0, &dirs, [0.0, 0.0]).iter().all(|v| *v == Cx::new(1.0, 0.0)));
        let v = phi_z(3.0, &dirs, [0.4, -1.1]);
        assert!((norm2(&v).powi(2) - 16.0).abs() < 1e-13);
    }

    #[test]
    fn grid_layout_and_writers() {
        let fs = FSharp::from_hermitian(&ComplexMatrix::from_diagonal(&[2.0, 1.0, 0.5, 0.1])).unwrap();
        let p = FilterPolynomial::from_coefficients(vec![1.0], spec(0.3, 1, 1));
        let dirs = crate::farfield::directions::<f64>(4);
        let region = Region::new(-1.0, 1.0, 0.0, 2.0).unwrap();
        let grid = imaging_grid(&fs, &p, 2.0, &dirs, region, 3, 2).unwrap();
        assert_eq!(grid.values.len(), 9);
        assert_eq!(grid.x(2), 1.0);
        assert_eq!(grid.y(1), 1.0);
        let w = imaging_value(&fs, &p, 2.0, &dirs, [0.0, 2.0], 2).unwrap();
        assert!((grid.value(1, 2) - w).abs() < 1e-12 * w);

        let mut csv = Vec::new();
        grid.write_csv(&mut csv).unwrap();
        let csv = String::from_utf8(csv).unwrap();
        let lines: Vec<&str> = csv.lines().collect();
        assert_eq!(lines[0], "x,y,w");
        assert_eq!(lines.len(), 10);
        assert!(lines[1].starts_with("-1.0000000000000000e0,0.0000000000000000e0,"));

        let mut pgm = Vec::new();
        grid.write_pgm(&mut pgm).unwrap();
        let pgm = String::from_utf8(pgm).unwrap();
        let lines: Vec<&str> = pgm.lines().collect();
        assert_eq!(&lines[..3], &["P2", "3 3", "255"]);
        assert!(pgm.split_whitespace().skip(4).any(|t| t == "255"));
        assert!(Region::new(1.0, 1.0, 0.0, 1.0).is_err());
        assert!(imaging_grid(&fs, &p, 2.0, &dirs, region, 1, 2).is_err());
    }

    #[test]
    fn noise_is_normalized_and_seeded() {
        let e = noise_matrix::<f64>(16, 7, NoiseNorm::Spectral);
        assert!((spectral_norm(&e) - 1.0).abs() < 1e-10);
        assert_eq!(e, noise_matrix::<f64>(16, 7, NoiseNorm::Spectral));
        assert_ne!(e, noise_matrix::<f64>(16, 8, NoiseNorm::Spectral));
        let f = noise_matrix::<f64>(16, 7, NoiseNorm::Frobenius);
        assert!((f.frobenius_norm() - 1.0).abs() < 1e-12);
    }
}
