//! Collocation boundary element solver for scattering by a conductive
//! transmission obstacle.
//!
//! The interior field is `u = S_kappa psi` with `kappa = k sqrt(n)` and the
//! scattered field is `u^s = S_k phi`. The densities solve
//!
//! ```text
//! S_kappa psi - S_k phi                                     = u^i
//! (1/2 + K'_kappa) psi - (-1/2 + K'_k) phi - eta S_k phi    = d_nu u^i + eta u^i
//! ```
//!
//! Densities are piecewise quadratic on `Nf` faces of the parameter interval
//! and collocated at the three Gauss-Legendre points of each face.
//! The logarithmic part of each kernel is integrated against the basis with
//! a Gauss rule for the weight `-ln x`.

use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::farfield::{directions, FarFieldMatrix};
use crate::geometry::{BoundaryCurve, CurveNode, CurveSample, Jet, Point};
use crate::linops::{ComplexMatrix, LuFactorization};
use crate::quadrature::{gauss_legendre, gauss_log, Rule};
use crate::scalar::{cx, i_unit, re, sqrt_upper, Cx, Real};
use crate::specfun::cylinder01;

pub const NODES_PER_FACE: usize = 3;

/// Smallest accepted face count.
pub const MIN_FACES: usize = 3;

/// Quadrature orders used on each face.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct QuadratureOrders {
    /// Gauss-Legendre points on a regular panel.
    pub regular: usize,
    /// Points of the `-ln x` rule on each side of the self-face singularity.
    pub log: usize,
    /// Gauss-Legendre points per face for the far-field integral.
    pub far_field: usize,
    /// Bisect panels that are near the collocation point or long in wavelengths.
    pub adaptive: bool,
}

impl Default for QuadratureOrders {
    fn default() -> Self {
        Self {
            regular: 12,
            log: 12,
            far_field: 16,
            adaptive: true,
        }
    }
}

/// A panel is bisected while the collocation point is closer to its midpoint
/// than this multiple of its length.
const NEAR_RATIO: f64 = 1.5;

/// Largest `|wavenumber| * panel length` integrated without bisection.
const WAVE_LIMIT: f64 = 3.0;

const MAX_DEPTH: usize = 40;

/// Constant-coefficient medium inside the obstacle.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Medium<T> {
    pub k: T,
    pub n: Cx<T>,
    pub eta: Cx<T>,
}

impl<T: Real> Medium<T> {
    pub fn new(k: T, n: Cx<T>, eta: Cx<T>) -> Result<Self> {
        if !(k > T::zero() && k.is_finite()) {
            return Err(Error::Parameter(format!("wavenumber must be positive, got {k}")));
        }
        if !(n.im >= T::zero() && n.re.is_finite() && n.im.is_finite()) {
            return Err(Error::Parameter(format!(
                "refractive index needs Im(n) >= 0, got {n}"
            )));
        }
        if !(eta.im >= T::zero() && eta.re.is_finite() && eta.im.is_finite()) {
            return Err(Error::Parameter(format!(
                "conductivity needs Im(eta) >= 0, got {eta}"
            )));
        }
        if n == Cx::default() {
            return Err(Error::Parameter("refractive index must be nonzero".into()));
        }
        Ok(Self { k, n, eta })
    }

    /// `k sqrt(n)` on the branch with `Im >= 0`.
    pub fn interior_wavenumber(&self) -> Cx<T> {
        sqrt_upper(self.n) * self.k
    }

    /// True when `n = 1` and `eta = 0`, i.e. there is no scatterer.
    pub fn is_vacuum(&self) -> bool {
        self.n == re(T::one()) && self.eta == Cx::default()
    }
}

/// How the boundary is represented on each face.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum FaceGeometry {
    /// Quadratic interpolant of the curve through the face endpoints and midpoint.
    #[default]
    Quadratic,
    /// The parametrization itself.
    Exact,
}

/// Face partition of the parameter interval and the quadrature rules used on it.
#[derive(Debug, Clone, PartialEq)]
pub struct Discretization<T> {
    faces: usize,
    geometry: FaceGeometry,
    orders: QuadratureOrders,
    local_nodes: [T; NODES_PER_FACE],
    params: Vec<T>,
    regular: Rule<T>,
    log: Rule<T>,
    far: Rule<T>,
}

impl<T: Real> Discretization<T> {
    pub fn new(faces: usize) -> Result<Self> {
        if faces < MIN_FACES {
            return Err(Error::Parameter(format!(
                "need at least {MIN_FACES} faces, got {faces}"
            )));
        }
        let gauss3 = gauss_legendre::<T>(NODES_PER_FACE);
        let local_nodes = [gauss3.nodes[0], gauss3.nodes[1], gauss3.nodes[2]];
        let h = T::TAU() / T::from_usize_lossy(faces);
        let params = (0..faces)
            .flat_map(|f| {
                local_nodes
                    .iter()
                    .map(move |&s| h * (T::from_usize_lossy(f) + s))
            })
            .collect();
        Self {
            faces,
            geometry: FaceGeometry::default(),
            orders: QuadratureOrders::default(),
            local_nodes,
            params,
            regular: Rule { nodes: vec![], weights: vec![] },
            log: Rule { nodes: vec![], weights: vec![] },
            far: Rule { nodes: vec![], weights: vec![] },
        }
        .with_quadrature(QuadratureOrders::default())
    }

    pub fn with_quadrature(mut self, orders: QuadratureOrders) -> Result<Self> {
        if orders.regular == 0 || orders.log == 0 || orders.far_field == 0 {
            return Err(Error::Parameter("quadrature orders must be positive".into()));
        }
        self.regular = gauss_legendre(orders.regular);
        self.log = gauss_log(orders.log)?;
        self.far = gauss_legendre(orders.far_field);
        self.orders = orders;
        Ok(self)
    }

    pub fn quadrature(&self) -> QuadratureOrders {
        self.orders
    }

    pub fn with_geometry(mut self, geometry: FaceGeometry) -> Self {
        self.geometry = geometry;
        self
    }

    pub fn faces(&self) -> usize {
        self.faces
    }

    pub fn geometry(&self) -> FaceGeometry {
        self.geometry
    }

    pub fn node_count(&self) -> usize {
        NODES_PER_FACE * self.faces
    }

    /// Collocation parameters, ascending in `[0, 2 pi)`.
    pub fn params(&self) -> &[T] {
        &self.params
    }

    /// Collocation points of one face in local coordinates `s` on `[0, 1]`.
    pub fn local_nodes(&self) -> [T; NODES_PER_FACE] {
        self.local_nodes
    }

    /// Parameter length of a face.
    pub fn face_length(&self) -> T {
        T::TAU() / T::from_usize_lossy(self.faces)
    }

    /// Quadratic Lagrange basis through the local nodes, evaluated at `s`.
    pub fn basis(&self, s: T) -> [T; NODES_PER_FACE] {
        let q = self.local_nodes;
        let mut out = [T::one(); NODES_PER_FACE];
        for (m, value) in out.iter_mut().enumerate() {
            for (l, &ql) in q.iter().enumerate() {
                if l != m {
                    *value *= (s - ql) / (q[m] - ql);
                }
            }
        }
        out
    }
}

/// A curve together with its discretization and collocation points.
#[derive(Debug, Clone)]
pub struct BoundaryMesh<T: Real> {
    curve: BoundaryCurve<T>,
    disc: Discretization<T>,
    /// Curve points at `s = 0, 1/2, 1` of every face.
    vertices: Vec<[Point<T>; 3]>,
    sample: CurveSample<T>,
}

#[derive(Debug, Clone, Copy)]
struct SourcePoint<T> {
    position: Point<T>,
    /// `|dy/ds|`: arclength per unit of local coordinate.
    jacobian: T,
}

impl<T: Real> BoundaryMesh<T> {
    pub fn new(curve: &BoundaryCurve<T>, disc: &Discretization<T>) -> Result<Self> {
        let h = disc.face_length();
        let half = T::lit(0.5);
        let vertices = (0..disc.faces())
            .map(|f| {
                let t = h * T::from_usize_lossy(f);
                let next = h * T::from_usize_lossy((f + 1) % disc.faces());
                [
                    curve.position(t),
                    curve.position(t + half * h),
                    curve.position(next),
                ]
            })
            .collect();
        let mut mesh = Self {
            curve: curve.clone(),
            disc: disc.clone(),
            vertices,
            sample: CurveSample { nodes: Vec::new() },
        };
        let local = disc.local_nodes();
        let nodes = (0..disc.node_count())
            .map(|i| {
                let face = i / NODES_PER_FACE;
                CurveNode::from_jet(disc.params()[i], mesh.face_jet(face, local[i % NODES_PER_FACE]))
            })
            .collect::<Result<Vec<_>>>()?;
        mesh.sample = CurveSample { nodes };
        Ok(mesh)
    }

    pub fn curve(&self) -> &BoundaryCurve<T> {
        &self.curve
    }

    pub fn discretization(&self) -> &Discretization<T> {
        &self.disc
    }

    /// Collocation points on the discrete boundary.
    pub fn sample(&self) -> &CurveSample<T> {
        &self.sample
    }

    pub fn node_count(&self) -> usize {
        self.disc.node_count()
    }

    /// Position and parameter derivatives of the discrete boundary at local
    /// coordinate `s` of a face.
    pub fn face_jet(&self, face: usize, s: T) -> Jet<T> {
        let h = self.disc.face_length();
        match self.disc.geometry {
            FaceGeometry::Exact => self.curve.jet(h * (T::from_usize_lossy(face) + s)),
            FaceGeometry::Quadratic => {
                let [p0, p1, p2] = self.vertices[face];
                let two = T::lit(2.0);
                let four = T::lit(4.0);
                let l = [
                    two * (s - T::lit(0.5)) * (s - T::one()),
                    -four * s * (s - T::one()),
                    two * s * (s - T::lit(0.5)),
                ];
                let dl = [four * s - T::lit(3.0), four - T::lit(8.0) * s, four * s - T::one()];
                let ddl = [four, -T::lit(8.0), four];
                let combine = |w: [T; 3]| {
                    [
                        w[0] * p0[0] + w[1] * p1[0] + w[2] * p2[0],
                        w[0] * p0[1] + w[1] * p1[1] + w[2] * p2[1],
                    ]
                };
                let d = combine(dl);
                let dd = combine(ddl);
                Jet {
                    position: combine(l),
                    derivative: [d[0] / h, d[1] / h],
                    second: [dd[0] / (h * h), dd[1] / (h * h)],
                }
            }
        }
    }

    fn source(&self, face: usize, s: T) -> SourcePoint<T> {
        let jet = self.face_jet(face, s);
        SourcePoint {
            position: jet.position,
            jacobian: self.disc.face_length() * jet.derivative[0].hypot(jet.derivative[1]),
        }
    }
}

/// Single-layer and adjoint double-layer matrices for one wavenumber.
#[derive(Debug, Clone, PartialEq)]
pub struct LayerOperators<T> {
    pub wavenumber: Cx<T>,
    pub single: ComplexMatrix<T>,
    pub adjoint_double: ComplexMatrix<T>,
}

/// Kernel values at one source point: full kernels and the coefficients of
/// `ln r` in each.
struct KernelValues<T> {
    single: Cx<T>,
    double: Cx<T>,
    single_log: Cx<T>,
    double_log: Cx<T>,
}

fn kernel<T: Real>(kappa: Cx<T>, x: &CurveNode<T>, y: Point<T>) -> Result<KernelValues<T>> {
    let d = [x.position[0] - y[0], x.position[1] - y[1]];
    let r = d[0].hypot(d[1]);
    let c = cylinder01(kappa * r)?;
    let proj = (x.normal[0] * d[0] + x.normal[1] * d[1]) / r;
    let quarter = T::lit(0.25);
    let inv_two_pi = T::FRAC_1_PI() * T::lit(0.5);
    let i = i_unit::<T>();
    Ok(KernelValues {
        single: i * c.h0() * quarter,
        double: -(i * kappa * c.h1()) * (quarter * proj),
        single_log: -c.j0 * inv_two_pi,
        double_log: kappa * c.j1 * (proj * inv_two_pi),
    })
}

/// Accumulates one collocation row of `S` and `K'` for every wavenumber.
struct RowIntegrator<'a, T: Real> {
    mesh: &'a BoundaryMesh<T>,
    x: CurveNode<T>,
    wavenumbers: &'a [Cx<T>],
    kmax: T,
    single: Vec<Vec<Cx<T>>>,
    double: Vec<Vec<Cx<T>>>,
}

impl<'a, T: Real> RowIntegrator<'a, T> {
    fn new(mesh: &'a BoundaryMesh<T>, row: usize, wavenumbers: &'a [Cx<T>]) -> Self {
        let m = mesh.node_count();
        let kmax = wavenumbers
            .iter()
            .map(|k| k.norm())
            .fold(T::zero(), T::max);
        Self {
            mesh,
            x: mesh.sample.nodes[row],
            wavenumbers,
            kmax,
            single: vec![vec![Cx::default(); m]; wavenumbers.len()],
            double: vec![vec![Cx::default(); m]; wavenumbers.len()],
        }
    }

    fn distance(&self, y: Point<T>) -> T {
        (self.x.position[0] - y[0]).hypot(self.x.position[1] - y[1])
    }

    /// Smooth-kernel quadrature on `[a, b]` of one face with adaptive bisection.
    fn regular(&mut self, face: usize, a: T, b: T, depth: usize) -> Result<()> {
        let half = T::lit(0.5);
        let mid = self.mesh.source(face, half * (a + b));
        let len = (b - a) * mid.jacobian;
        let near = self.distance(mid.position) < T::lit(NEAR_RATIO) * len;
        let long = self.kmax * len > T::lit(WAVE_LIMIT);
        if self.mesh.disc.orders.adaptive && depth < MAX_DEPTH && (near || long) {
            let c = half * (a + b);
            self.regular(face, a, c, depth + 1)?;
            return self.regular(face, c, b, depth + 1);
        }
        let mesh = self.mesh;
        let rule = &mesh.disc.regular;
        for (&u, &w) in rule.nodes.iter().zip(&rule.weights) {
            let s = a + (b - a) * u;
            let y = mesh.source(face, s);
            let weight = w * (b - a) * y.jacobian;
            let basis = mesh.disc.basis(s);
            for (slot, &kappa) in self.wavenumbers.iter().enumerate() {
                let kv = kernel(kappa, &self.x, y.position)?;
                for (m, &l) in basis.iter().enumerate() {
                    let col = NODES_PER_FACE * face + m;
                    self.single[slot][col] += kv.single * (weight * l);
                    self.double[slot][col] += kv.double * (weight * l);
                }
            }
        }
        Ok(())
    }

    /// The face that contains the collocation point at local coordinate `s0`.
    ///
    /// On `s = s0 + sign L u`, `u` in `[0, 1]`, write the kernel as
    /// `A ln|s - s0| + B`; then
    /// `int G = L int (G - A ln u) du - L int A (-ln u) du`.
    fn singular(&mut self, face: usize, s0: T) -> Result<()> {
        let mesh = self.mesh;
        let at = mesh.source(face, s0);
        let reach = if mesh.disc.orders.adaptive {
            T::lit(WAVE_LIMIT) / (self.kmax.max(T::epsilon()) * at.jacobian)
        } else {
            T::one()
        };
        for sign in [-T::one(), T::one()] {
            let side = if sign < T::zero() { s0 } else { T::one() - s0 };
            let len = side.min(reach);
            for (rule, logarithmic) in [(&mesh.disc.regular, false), (&mesh.disc.log, true)] {
                for (&u, &w) in rule.nodes.iter().zip(&rule.weights) {
                    let s = s0 + sign * len * u;
                    let y = mesh.source(face, s);
                    let weight = w * len * y.jacobian;
                    let basis = mesh.disc.basis(s);
                    let ln_u = u.ln();
                    for (slot, &kappa) in self.wavenumbers.iter().enumerate() {
                        let kv = kernel(kappa, &self.x, y.position)?;
                        let (vs, vd) = if logarithmic {
                            (-kv.single_log, -kv.double_log)
                        } else {
                            (
                                kv.single - kv.single_log * ln_u,
                                kv.double - kv.double_log * ln_u,
                            )
                        };
                        for (m, &l) in basis.iter().enumerate() {
                            let col = NODES_PER_FACE * face + m;
                            self.single[slot][col] += vs * (weight * l);
                            self.double[slot][col] += vd * (weight * l);
                        }
                    }
                }
            }
            if len < side {
                if sign < T::zero() {
                    self.regular(face, T::zero(), s0 - len, 0)?;
                } else {
                    self.regular(face, s0 + len, T::one(), 0)?;
                }
            }
        }
        Ok(())
    }
}

/// Assembles `S` and `K'` for each wavenumber in a single pass over the
/// quadrature points.
pub fn assemble_layers<T: Real>(
    mesh: &BoundaryMesh<T>,
    wavenumbers: &[Cx<T>],
) -> Result<Vec<LayerOperators<T>>> {
    for kappa in wavenumbers {
        if !(kappa.norm() > T::zero()) || kappa.im < T::zero() {
            return Err(Error::Parameter(format!(
                "layer wavenumber must be nonzero with Im >= 0, got {kappa}"
            )));
        }
    }
    let m = mesh.node_count();
    let faces = mesh.disc.faces();
    let local = mesh.disc.local_nodes();
    let rows: Vec<(Vec<Vec<Cx<T>>>, Vec<Vec<Cx<T>>>)> = (0..m)
        .into_par_iter()
        .map(|row| {
            let mut integ = RowIntegrator::new(mesh, row, wavenumbers);
            let own = row / NODES_PER_FACE;
            for face in 0..faces {
                if face == own {
                    integ.singular(face, local[row % NODES_PER_FACE])?;
                } else {
                    integ.regular(face, T::zero(), T::one(), 0)?;
                }
            }
            Ok((integ.single, integ.double))
        })
        .collect::<Result<_>>()?;

    Ok(wavenumbers
        .iter()
        .enumerate()
        .map(|(slot, &wavenumber)| LayerOperators {
            wavenumber,
            single: ComplexMatrix::from_fn(m, m, |i, j| rows[i].0[slot][j]),
            adjoint_double: ComplexMatrix::from_fn(m, m, |i, j| rows[i].1[slot][j]),
        })
        .collect())
}

pub fn assemble_single_layer<T: Real>(
    mesh: &BoundaryMesh<T>,
    wavenumber: Cx<T>,
) -> Result<ComplexMatrix<T>> {
    Ok(assemble_layers(mesh, &[wavenumber])?.remove(0).single)
}

pub fn assemble_adjoint_double_layer<T: Real>(
    mesh: &BoundaryMesh<T>,
    wavenumber: Cx<T>,
) -> Result<ComplexMatrix<T>> {
    Ok(assemble_layers(mesh, &[wavenumber])?.remove(0).adjoint_double)
}

/// Matrix taking nodal values of `phi` to `int e^{-ik x.y} phi(y) ds(y)` for
/// each observation direction `x`.
pub fn far_field_operator<T: Real>(
    mesh: &BoundaryMesh<T>,
    k: T,
    obs_dirs: &[Point<T>],
) -> ComplexMatrix<T> {
    let disc = &mesh.disc;
    let points: Vec<(SourcePoint<T>, T, [T; NODES_PER_FACE], usize)> = (0..disc.faces())
        .flat_map(|face| {
            disc.far
                .nodes
                .iter()
                .zip(&disc.far.weights)
                .map(move |(&s, &w)| (face, s, w))
        })
        .map(|(face, s, w)| {
            let y = mesh.source(face, s);
            (y, w * y.jacobian, disc.basis(s), face)
        })
        .collect();
    let mut out = ComplexMatrix::zeros(obs_dirs.len(), mesh.node_count());
    let cols = mesh.node_count();
    out.as_mut_slice()
        .par_chunks_mut(cols.max(1))
        .zip(obs_dirs.par_iter())
        .for_each(|(row, d)| {
            for (y, w, basis, face) in &points {
                let phase = -k * (d[0] * y.position[0] + d[1] * y.position[1]);
                let (sn, cs) = phase.sin_cos();
                let e = cx(cs, sn) * *w;
                for (m, &l) in basis.iter().enumerate() {
                    row[NODES_PER_FACE * face + m] += e * l;
                }
            }
        });
    out
}

/// `u_inf(x) = int e^{-ik x.y} phi(y) ds(y)` for each direction in `obs_dirs`.
pub fn far_field_row<T: Real>(
    phi: &[Cx<T>],
    mesh: &BoundaryMesh<T>,
    k: T,
    obs_dirs: &[Point<T>],
) -> Result<Vec<Cx<T>>> {
    far_field_operator(mesh, k, obs_dirs).matvec(phi)
}

/// Interior and exterior densities for one incident direction.
#[derive(Debug, Clone, PartialEq)]
pub struct Densities<T> {
    pub psi: Vec<Cx<T>>,
    pub phi: Vec<Cx<T>>,
    /// `max |A x - b| / max |b|` of the block system.
    pub residual: T,
}

/// Assembled and factored block system for one curve and medium.
#[derive(Debug, Clone)]
pub struct ForwardSolver<T: Real> {
    medium: Medium<T>,
    mesh: BoundaryMesh<T>,
    system: ComplexMatrix<T>,
    lu: LuFactorization<T>,
}

impl<T: Real> ForwardSolver<T> {
    pub fn new(curve: &BoundaryCurve<T>, medium: &Medium<T>, disc: &Discretization<T>) -> Result<Self> {
        let mesh = BoundaryMesh::new(curve, disc)?;
        let failure = |reason: String| Error::Forward {
            k: medium.k.to_f64().unwrap_or(f64::NAN),
            faces: disc.faces(),
            reason,
        };
        let ops = assemble_layers(&mesh, &[medium.interior_wavenumber(), re(medium.k)])
            .map_err(|e| failure(e.to_string()))?;
        let (inner, outer) = (&ops[0], &ops[1]);
        let m = mesh.node_count();
        let half = T::lit(0.5);
        let eta = medium.eta;
        let system = ComplexMatrix::from_fn(2 * m, 2 * m, |i, j| {
            let diag = if i % m == j % m { half } else { T::zero() };
            match (i < m, j < m) {
                (true, true) => inner.single[(i, j)],
                (true, false) => -outer.single[(i, j - m)],
                (false, true) => inner.adjoint_double[(i - m, j)] + diag,
                (false, false) => {
                    let (r, c) = (i - m, j - m);
                    re(diag) - outer.adjoint_double[(r, c)] - eta * outer.single[(r, c)]
                }
            }
        });
        if !system.is_finite() {
            return Err(failure("non-finite operator entries".into()));
        }
        let lu = LuFactorization::new(&system).map_err(|e| failure(e.to_string()))?;
        if lu.ill_conditioned() {
            return Err(failure(format!(
                "block system is numerically singular (pivot ratio {:.3e})",
                lu.pivot_ratio()
            )));
        }
        Ok(Self {
            medium: *medium,
            mesh,
            system,
            lu,
        })
    }

    pub fn medium(&self) -> &Medium<T> {
        &self.medium
    }

    pub fn mesh(&self) -> &BoundaryMesh<T> {
        &self.mesh
    }

    pub fn system(&self) -> &ComplexMatrix<T> {
        &self.system
    }

    /// Largest over smallest pivot magnitude of the factored system.
    pub fn pivot_ratio(&self) -> T {
        self.lu.pivot_ratio()
    }

    /// Right-hand side `(u^i, d_nu u^i + eta u^i)` for a plane wave `e^{ik x.d}`.
    pub fn right_hand_side(&self, dir: Point<T>) -> Vec<Cx<T>> {
        let k = self.medium.k;
        let nodes = &self.mesh.sample.nodes;
        let m = nodes.len();
        let mut b = vec![Cx::default(); 2 * m];
        for (i, node) in nodes.iter().enumerate() {
            let phase = k * (node.position[0] * dir[0] + node.position[1] * dir[1]);
            let (sn, cs) = phase.sin_cos();
            let ui = cx(cs, sn);
            let dn = i_unit::<T>() * ui * (k * (node.normal[0] * dir[0] + node.normal[1] * dir[1]));
            b[i] = ui;
            b[m + i] = dn + self.medium.eta * ui;
        }
        b
    }

    /// Solves for the densities of an arbitrary right-hand side.
    pub fn solve_rhs(&self, rhs: &[Cx<T>]) -> Result<Densities<T>> {
        let x = self.lu.solve_vec(rhs)?;
        let residual = self.residual(&x, rhs)?;
        let m = self.mesh.node_count();
        Ok(Densities {
            psi: x[..m].to_vec(),
            phi: x[m..].to_vec(),
            residual,
        })
    }

    pub fn solve(&self, dir: Point<T>) -> Result<Densities<T>> {
        self.solve_rhs(&self.right_hand_side(dir))
    }

    fn residual(&self, x: &[Cx<T>], rhs: &[Cx<T>]) -> Result<T> {
        let ax = self.system.matvec(x)?;
        let num = ax
            .iter()
            .zip(rhs)
            .map(|(a, b)| (a - b).norm())
            .fold(T::zero(), T::max);
        let den = rhs.iter().map(|b| b.norm()).fold(T::zero(), T::max);
        Ok(if den > T::zero() { num / den } else { num })
    }

    pub fn far_field(&self, phi: &[Cx<T>], obs_dirs: &[Point<T>]) -> Result<Vec<Cx<T>>> {
        far_field_row(phi, &self.mesh, self.medium.k, obs_dirs)
    }

    /// `N x N` far-field matrix on equispaced directions; column `j` belongs
    /// to incident direction `j`.
    pub fn far_field_matrix(&self, n: usize) -> Result<FarFieldMatrix<T>> {
        if n < 2 {
            return Err(Error::Parameter(format!("need at least 2 directions, got {n}")));
        }
        let dirs = directions::<T>(n);
        let m = self.mesh.node_count();
        let rhs: Vec<Vec<Cx<T>>> = dirs.iter().map(|&d| self.right_hand_side(d)).collect();
        let rhs = ComplexMatrix::from_columns(&rhs)?;
        let x = self.lu.solve(&rhs)?;
        let phi = ComplexMatrix::from_fn(m, n, |i, j| x[(m + i, j)]);
        let op = far_field_operator(&self.mesh, self.medium.k, &dirs);
        FarFieldMatrix::new(self.medium.k, op.matmul(&phi)?)
    }
}

pub fn solve_scattering<T: Real>(
    curve: &BoundaryCurve<T>,
    medium: &Medium<T>,
    disc: &Discretization<T>,
    incident_dir: Point<T>,
) -> Result<Densities<T>> {
    ForwardSolver::new(curve, medium, disc)?.solve(incident_dir)
}

pub fn far_field_matrix<T: Real>(
    curve: &BoundaryCurve<T>,
    medium: &Medium<T>,
    disc: &Discretization<T>,
    n: usize,
) -> Result<FarFieldMatrix<T>> {
    if n < 2 {
        return Err(Error::Parameter(format!("need at least 2 directions, got {n}")));
    }
    ForwardSolver::new(curve, medium, disc)?.far_field_matrix(n)
}
