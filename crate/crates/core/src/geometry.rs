//! Smooth closed boundary curves.
//!
//! Curves are kept analytic so the boundary element solver can sample them at
//! any density. Every curve is normalized to counter-clockwise orientation,
//! which makes `(y', -x') / |x'|` the outward unit normal.

use std::fmt;
use std::path::Path;
use std::sync::Arc;

use crate::error::{Error, Result};
use crate::scalar::Real;

pub type Point<T> = [T; 2];

/// Node count of the polygon used by the simplicity and winding tests.
pub const POLYGON_NODES: usize = 512;

/// Position and first two derivatives at one parameter value.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Jet<T> {
    pub position: Point<T>,
    pub derivative: Point<T>,
    pub second: Point<T>,
}

/// A 2π-periodic parametrization with analytic derivatives.
pub trait Parametrization<T: Real>: Send + Sync {
    fn jet(&self, t: T) -> Jet<T>;
}

#[derive(Debug, Clone, Copy)]
pub struct Circle<T> {
    pub radius: T,
}

impl<T: Real> Parametrization<T> for Circle<T> {
    fn jet(&self, t: T) -> Jet<T> {
        let (s, c) = t.sin_cos();
        let r = self.radius;
        Jet {
            position: [r * c, r * s],
            derivative: [-r * s, r * c],
            second: [-r * c, -r * s],
        }
    }
}

/// `(-1.5 sin t, cos t + 0.65 cos 2t - 0.65)`.
#[derive(Debug, Clone, Copy, Default)]
pub struct Kite;

impl<T: Real> Parametrization<T> for Kite {
    fn jet(&self, t: T) -> Jet<T> {
        let (s, c) = t.sin_cos();
        let (s2, c2) = (t + t).sin_cos();
        let a = T::lit(1.5);
        let b = T::lit(0.65);
        let two = T::lit(2.0);
        let four = T::lit(4.0);
        Jet {
            position: [-a * s, c + b * c2 - b],
            derivative: [-a * c, -s - two * b * s2],
            second: [a * s, -c - four * b * c2],
        }
    }
}

/// `rho(t) (cos t, sin t)` with `rho(t) = 2 sqrt(sin^2 t / 2 + cos^2 t / 10)`.
#[derive(Debug, Clone, Copy, Default)]
pub struct Peanut;

impl<T: Real> Parametrization<T> for Peanut {
    fn jet(&self, t: T) -> Jet<T> {
        let (s, c) = t.sin_cos();
        let (s2, c2) = (t + t).sin_cos();
        // g = sin^2/2 + cos^2/10 = 0.3 - 0.2 cos 2t
        let g = T::lit(0.3) - T::lit(0.2) * c2;
        let sg = g.sqrt();
        let rho = T::lit(2.0) * sg;
        let drho = T::lit(0.4) * s2 / sg;
        let ddrho = T::lit(0.8) * c2 / sg - T::lit(0.08) * s2 * s2 / (g * sg);
        let two = T::lit(2.0);
        Jet {
            position: [rho * c, rho * s],
            derivative: [drho * c - rho * s, drho * s + rho * c],
            second: [
                ddrho * c - two * drho * s - rho * c,
                ddrho * s + two * drho * c - rho * s,
            ],
        }
    }
}

/// Truncated Fourier series per coordinate:
/// `x(t) = a0 + sum_m (a_m cos(m t) + b_m sin(m t))`.
#[derive(Debug, Clone, PartialEq)]
pub struct TrigSeries<T> {
    /// `[a0, a1, b1, a2, b2, ...]` for each coordinate.
    pub x: Vec<T>,
    pub y: Vec<T>,
}

fn eval_series<T: Real>(coeffs: &[T], t: T) -> (T, T, T) {
    let mut v = coeffs.first().copied().unwrap_or_else(T::zero);
    let mut d = T::zero();
    let mut dd = T::zero();
    for (m, pair) in coeffs[1.min(coeffs.len())..].chunks(2).enumerate() {
        let mf = T::from_usize_lossy(m + 1);
        let a = pair[0];
        let b = pair.get(1).copied().unwrap_or_else(T::zero);
        let (s, c) = (mf * t).sin_cos();
        v += a * c + b * s;
        d += mf * (b * c - a * s);
        dd -= mf * mf * (a * c + b * s);
    }
    (v, d, dd)
}

impl<T: Real> Parametrization<T> for TrigSeries<T> {
    fn jet(&self, t: T) -> Jet<T> {
        let (x, dx, ddx) = eval_series(&self.x, t);
        let (y, dy, ddy) = eval_series(&self.y, t);
        Jet {
            position: [x, y],
            derivative: [dx, dy],
            second: [ddx, ddy],
        }
    }
}

impl<T: Real> TrigSeries<T> {
    /// Parses the two-line `x: a0 a1 b1 ...` / `y: ...` format. Blank lines and
    /// lines starting with `#` are skipped.
    pub fn parse(text: &str) -> Result<Self> {
        let mut x = None;
        let mut y = None;
        for (idx, raw) in text.lines().enumerate() {
            let line = raw.trim();
            if line.is_empty() || line.starts_with('#') {
                continue;
            }
            let (key, rest) = line.split_once(':').ok_or_else(|| Error::Parse {
                line: idx + 1,
                msg: "expected `x:` or `y:` prefix".into(),
            })?;
            let coeffs = rest
                .split_whitespace()
                .map(|tok| {
                    tok.parse::<f64>().map(T::lit).map_err(|e| Error::Parse {
                        line: idx + 1,
                        msg: format!("bad coefficient `{tok}`: {e}"),
                    })
                })
                .collect::<Result<Vec<T>>>()?;
            if coeffs.is_empty() {
                return Err(Error::Parse {
                    line: idx + 1,
                    msg: "no coefficients".into(),
                });
            }
            match key.trim() {
                "x" => x = Some(coeffs),
                "y" => y = Some(coeffs),
                other => {
                    return Err(Error::Parse {
                        line: idx + 1,
                        msg: format!("unknown coordinate `{other}`"),
                    })
                }
            }
        }
        match (x, y) {
            (Some(x), Some(y)) => Ok(Self { x, y }),
            _ => Err(Error::InvalidCurve(
                "curve file needs both an `x:` and a `y:` line".into(),
            )),
        }
    }
}

/// Named preset shapes.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Preset<T> {
    Circle(T),
    Kite,
    Peanut,
}

/// A regular, simple, counter-clockwise closed curve.
#[derive(Clone)]
pub struct BoundaryCurve<T: Real> {
    name: String,
    map: Arc<dyn Parametrization<T>>,
    reversed: bool,
}

impl<T: Real> fmt::Debug for BoundaryCurve<T> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("BoundaryCurve")
            .field("name", &self.name)
            .field("reversed", &self.reversed)
            .finish()
    }
}

impl<T: Real> BoundaryCurve<T> {
    /// Wraps a parametrization, flipping its direction if needed and
    /// rejecting irregular or self-intersecting curves.
    pub fn new(name: impl Into<String>, map: Arc<dyn Parametrization<T>>) -> Result<Self> {
        let mut curve = Self {
            name: name.into(),
            map,
            reversed: false,
        };
        let pts = curve.polygon(POLYGON_NODES);
        for (i, p) in pts.iter().enumerate() {
            if !(p[0].is_finite() && p[1].is_finite()) {
                return Err(Error::InvalidCurve(format!("non-finite point at node {i}")));
            }
        }
        if polygon_self_intersects(&pts) {
            return Err(Error::InvalidCurve(format!(
                "curve `{}` intersects itself",
                curve.name
            )));
        }
        if signed_area(&pts) < T::zero() {
            curve.reversed = true;
        }
        Ok(curve)
    }

    pub fn preset(preset: Preset<T>) -> Result<Self> {
        match preset {
            Preset::Circle(r) => {
                if !(r > T::zero()) {
                    return Err(Error::Parameter(format!("circle radius must be > 0, got {r}")));
                }
                Self::new(format!("circle({r})"), Arc::new(Circle { radius: r }))
            }
            Preset::Kite => Self::new("kite", Arc::new(Kite)),
            Preset::Peanut => Self::new("peanut", Arc::new(Peanut)),
        }
    }

    /// `circle`, `circle:<R>`, `kite`, `peanut` or `file:<path>`.
    pub fn from_name(name: &str) -> Result<Self> {
        let name = name.trim();
        if let Some(path) = name.strip_prefix("file:") {
            return Self::from_file(path);
        }
        match name {
            "circle" | "disk" => Self::preset(Preset::Circle(T::one())),
            "kite" => Self::preset(Preset::Kite),
            "peanut" => Self::preset(Preset::Peanut),
            other => {
                if let Some(r) = other
                    .strip_prefix("circle:")
                    .or_else(|| other.strip_prefix("circle(").and_then(|s| s.strip_suffix(')')))
                {
                    let r: f64 = r
                        .trim()
                        .parse()
                        .map_err(|_| Error::UnknownShape(other.to_string()))?;
                    return Self::preset(Preset::Circle(T::lit(r)));
                }
                Err(Error::UnknownShape(other.to_string()))
            }
        }
    }

    pub fn from_file(path: impl AsRef<Path>) -> Result<Self> {
        let path = path.as_ref();
        let text = std::fs::read_to_string(path)?;
        let series = TrigSeries::<T>::parse(&text)?;
        Self::new(path.display().to_string(), Arc::new(series))
    }

    pub fn name(&self) -> &str {
        &self.name
    }

    pub fn jet(&self, t: T) -> Jet<T> {
        if self.reversed {
            let j = self.map.jet(-t);
            Jet {
                position: j.position,
                derivative: [-j.derivative[0], -j.derivative[1]],
                second: j.second,
            }
        } else {
            self.map.jet(t)
        }
    }

    pub fn position(&self, t: T) -> Point<T> {
        self.jet(t).position
    }

    /// Vertices at `t_i = 2 pi i / n`.
    pub fn polygon(&self, n: usize) -> Vec<Point<T>> {
        let step = T::TAU() / T::from_usize_lossy(n);
        (0..n)
            .map(|i| self.position(step * T::from_usize_lossy(i)))
            .collect()
    }

    /// Winding-number membership test against the 512-vertex polygon.
    pub fn contains(&self, z: Point<T>) -> bool {
        point_in_polygon(&self.polygon(POLYGON_NODES), z)
    }

    /// Unsigned distance from `z` to the boundary polygon with `n` vertices.
    pub fn distance_to_boundary(&self, z: Point<T>, n: usize) -> T {
        let pts = self.polygon(n);
        (0..pts.len())
            .map(|i| segment_distance(z, pts[i], pts[(i + 1) % pts.len()]))
            .fold(T::infinity(), T::min)
    }
}

/// One sampled boundary node.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CurveNode<T> {
    pub t: T,
    pub position: Point<T>,
    /// Unit tangent.
    pub tangent: Point<T>,
    /// Outward unit normal.
    pub normal: Point<T>,
    /// `|x'(t)|`.
    pub speed: T,
    /// `x''(t)`.
    pub second: Point<T>,
}

impl<T: Real> CurveNode<T> {
    pub fn from_jet(t: T, jet: Jet<T>) -> Result<Self> {
        let [dx, dy] = jet.derivative;
        let speed = dx.hypot(dy);
        if !(speed >= T::lit(1e-12)) {
            return Err(Error::DegenerateCurve {
                t: t.to_f64().unwrap_or(f64::NAN),
                speed: speed.to_f64().unwrap_or(f64::NAN),
            });
        }
        Ok(Self {
            t,
            position: jet.position,
            tangent: [dx / speed, dy / speed],
            normal: [dy / speed, -dx / speed],
            speed,
            second: jet.second,
        })
    }

    /// Signed curvature, positive on convex arcs of a counter-clockwise curve.
    pub fn curvature(&self) -> T {
        let d = [self.tangent[0] * self.speed, self.tangent[1] * self.speed];
        (d[0] * self.second[1] - d[1] * self.second[0]) / (self.speed * self.speed * self.speed)
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct CurveSample<T> {
    pub nodes: Vec<CurveNode<T>>,
}

/// Evaluates the curve at strictly increasing parameters in `[0, 2 pi)`.
pub fn sample_curve<T: Real>(curve: &BoundaryCurve<T>, params: &[T]) -> Result<CurveSample<T>> {
    for w in params.windows(2) {
        if !(w[1] > w[0]) {
            return Err(Error::Parameter(
                "sample parameters must be strictly increasing".into(),
            ));
        }
    }
    if let (Some(&first), Some(&last)) = (params.first(), params.last()) {
        if first < T::zero() || last >= T::TAU() {
            return Err(Error::Parameter(
                "sample parameters must lie in [0, 2 pi)".into(),
            ));
        }
    }
    let nodes = params
        .iter()
        .map(|&t| CurveNode::from_jet(t, curve.jet(t)))
        .collect::<Result<Vec<_>>>()?;
    Ok(CurveSample { nodes })
}

pub fn preset_curve<T: Real>(preset: Preset<T>) -> Result<BoundaryCurve<T>> {
    BoundaryCurve::preset(preset)
}

pub fn point_in_region<T: Real>(curve: &BoundaryCurve<T>, z: Point<T>) -> bool {
    curve.contains(z)
}

/// Shoelace area; positive for counter-clockwise vertex order.
pub fn signed_area<T: Real>(pts: &[Point<T>]) -> T {
    let n = pts.len();
    let twice: T = (0..n)
        .map(|i| {
            let a = pts[i];
            let b = pts[(i + 1) % n];
            a[0] * b[1] - a[1] * b[0]
        })
        .sum();
    twice * T::lit(0.5)
}

/// Winding number of a closed polygon around `z`, nonzero means inside.
pub fn point_in_polygon<T: Real>(pts: &[Point<T>], z: Point<T>) -> bool {
    let n = pts.len();
    let mut winding = 0i32;
    for i in 0..n {
        let a = pts[i];
        let b = pts[(i + 1) % n];
        let cross = (b[0] - a[0]) * (z[1] - a[1]) - (z[0] - a[0]) * (b[1] - a[1]);
        if a[1] <= z[1] {
            if b[1] > z[1] && cross > T::zero() {
                winding += 1;
            }
        } else if b[1] <= z[1] && cross < T::zero() {
            winding -= 1;
        }
    }
    winding != 0
}

fn segment_distance<T: Real>(z: Point<T>, a: Point<T>, b: Point<T>) -> T {
    let ab = [b[0] - a[0], b[1] - a[1]];
    let az = [z[0] - a[0], z[1] - a[1]];
    let len2 = ab[0] * ab[0] + ab[1] * ab[1];
    let s = if len2 > T::zero() {
        ((az[0] * ab[0] + az[1] * ab[1]) / len2).max(T::zero()).min(T::one())
    } else {
        T::zero()
    };
    (az[0] - s * ab[0]).hypot(az[1] - s * ab[1])
}

fn orient<T: Real>(a: Point<T>, b: Point<T>, c: Point<T>) -> T {
    (b[0] - a[0]) * (c[1] - a[1]) - (b[1] - a[1]) * (c[0] - a[0])
}

fn segments_cross<T: Real>(p1: Point<T>, p2: Point<T>, q1: Point<T>, q2: Point<T>) -> bool {
    let d1 = orient(q1, q2, p1);
    let d2 = orient(q1, q2, p2);
    let d3 = orient(p1, p2, q1);
    let d4 = orient(p1, p2, q2);
    ((d1 > T::zero() && d2 < T::zero()) || (d1 < T::zero() && d2 > T::zero()))
        && ((d3 > T::zero() && d4 < T::zero()) || (d3 < T::zero() && d4 > T::zero()))
}

/// Proper crossings between non-adjacent edges of a closed polygon.
pub fn polygon_self_intersects<T: Real>(pts: &[Point<T>]) -> bool {
    let n = pts.len();
    for i in 0..n {
        let (a, b) = (pts[i], pts[(i + 1) % n]);
        for j in (i + 2)..n {
            if i == 0 && j == n - 1 {
                continue;
            }
            if segments_cross(a, b, pts[j], pts[(j + 1) % n]) {
                return true;
            }
        }
    }
    false
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::f64::consts::{PI, TAU};

    fn close(a: Point<f64>, b: Point<f64>, tol: f64) -> bool {
        (a[0] - b[0]).abs() <= tol && (a[1] - b[1]).abs() <= tol
    }

    #[test]
    fn preset_values() {
        let c = preset_curve(Preset::Circle(1.0)).unwrap();
        let s = sample_curve(&c, &[0.0]).unwrap();
        assert!(close(s.nodes[0].position, [1.0, 0.0], 1e-15));
        assert!(close(s.nodes[0].normal, [1.0, 0.0], 1e-15));

        let kite = preset_curve::<f64>(Preset::Kite).unwrap();
        assert!(close(kite.position(PI / 2.0), [-1.5, -1.3], 1e-14));

        let peanut = preset_curve::<f64>(Preset::Peanut).unwrap();
        assert!(close(peanut.position(0.0), [0.632_455_532_033_675_9, 0.0], 1e-15));
    }

    #[test]
    fn speeds_and_normals() {
        let c = preset_curve(Preset::Circle(2.0)).unwrap();
        let s = sample_curve(&c, &[0.0, PI / 2.0, PI, 1.5 * PI]).unwrap();
        assert!(s.nodes.iter().all(|n| (n.speed - 2.0).abs() < 1e-14));

        let params: Vec<f64> = (0..512).map(|i| TAU * i as f64 / 512.0).collect();
        for preset in [Preset::Circle(1.0), Preset::Kite, Preset::Peanut] {
            let curve = preset_curve(preset).unwrap();
            let s = sample_curve(&curve, &params).unwrap();
            for n in &s.nodes {
                assert!((n.normal[0].hypot(n.normal[1]) - 1.0).abs() < 1e-12);
                assert!((n.normal[0] * n.tangent[0] + n.normal[1] * n.tangent[1]).abs() < 1e-12);
            }
            let pts: Vec<_> = s.nodes.iter().map(|n| n.position).collect();
            assert!(signed_area(&pts) > 0.0, "{preset:?}");
        }
    }

    #[test]
    fn derivatives_match_finite_differences() {
        let h = 1e-5;
        for preset in [Preset::Circle(1.3), Preset::Kite, Preset::Peanut] {
            let curve = preset_curve(preset).unwrap();
            for i in 0..37 {
                let t = 0.17 * i as f64;
                let j = curve.jet(t);
                let (a, b) = (curve.jet(t + h), curve.jet(t - h));
                for c in 0..2 {
                    let d1 = (a.position[c] - b.position[c]) / (2.0 * h);
                    let d2 = (a.derivative[c] - b.derivative[c]) / (2.0 * h);
                    assert!((d1 - j.derivative[c]).abs() < 1e-8, "{preset:?} t={t}");
                    assert!((d2 - j.second[c]).abs() < 1e-8, "{preset:?} t={t}");
                }
            }
        }
    }

    #[test]
    fn clockwise_input_is_reversed() {
        // x = cos t, y = -sin t runs clockwise.
        let series = TrigSeries { x: vec![0.0, 1.0, 0.0], y: vec![0.0, 0.0, -1.0] };
        let curve = BoundaryCurve::new("cw", Arc::new(series)).unwrap();
        let s = sample_curve(&curve, &[0.0, 1.0]).unwrap();
        // outward normal on the unit circle is the position itself
        for n in &s.nodes {
            assert!(close(n.normal, n.position, 1e-14));
        }
    }

    #[test]
    fn circumference_by_riemann_sum() {
        let c = preset_curve(Preset::Circle(1.0)).unwrap();
        let n = 2048;
        let params: Vec<f64> = (0..n).map(|i| TAU * i as f64 / n as f64).collect();
        let s = sample_curve(&c, &params).unwrap();
        let len: f64 = s.nodes.iter().map(|p| p.speed * TAU / n as f64).sum();
        assert!((len - TAU).abs() <= 1e-10 * TAU);
    }

    #[test]
    fn sample_errors() {
        let c = preset_curve(Preset::Circle(1.0)).unwrap();
        assert!(sample_curve(&c, &[1.0, 0.5]).is_err());
        assert!(sample_curve(&c, &[0.0, TAU]).is_err());
        // zero radius is rejected, a point curve is degenerate
        assert!(preset_curve(Preset::Circle(0.0)).is_err());
        let j = Jet { position: [0.0, 0.0], derivative: [0.0, 0.0], second: [0.0, 0.0] };
        assert!(matches!(CurveNode::from_jet(0.0, j), Err(Error::DegenerateCurve { .. })));
    }

    #[test]
    fn membership() {
        let c = preset_curve(Preset::Circle(1.0)).unwrap();
        assert!(point_in_region(&c, [0.0, 0.0]));
        assert!(!point_in_region(&c, [2.0, 0.0]));
        let p = preset_curve::<f64>(Preset::Peanut).unwrap();
        assert!(point_in_region(&p, [0.0, 1.0]));
        assert!(!point_in_region(&p, [0.0, 1.5]));
        // dense polygon oracle at 8192 vertices
        let dense = p.polygon(8192);
        assert!(point_in_polygon(&dense, [0.0, 1.0]));
    }

    #[test]
    fn circle_membership_matches_radius() {
        use rand::{Rng, SeedableRng};
        let c = preset_curve(Preset::Circle(1.0)).unwrap();
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(7);
        for _ in 0..1000 {
            let z = [rng.gen_range(-1.5..1.5), rng.gen_range(-1.5..1.5)];
            let r: f64 = f64::hypot(z[0], z[1]);
            if (r - 1.0).abs() < 1e-3 {
                continue;
            }
            assert_eq!(point_in_region(&c, z), r < 1.0, "z={z:?}");
        }
    }

    #[test]
    fn self_intersection_rejected() {
        // figure eight: x = sin 2t, y = sin t
        let series = TrigSeries { x: vec![0.0, 0.0, 0.0, 0.0, 1.0], y: vec![0.0, 0.0, 1.0] };
        assert!(matches!(
            BoundaryCurve::new("eight", Arc::new(series)),
            Err(Error::InvalidCurve(_))
        ));
    }

    #[test]
    fn parse_series_file() {
        let s = TrigSeries::<f64>::parse("# ellipse\nx: 0 2 0\ny: 0.5 0 1\n").unwrap();
        assert_eq!(s.x, vec![0.0, 2.0, 0.0]);
        let curve = BoundaryCurve::new("ellipse", Arc::new(s)).unwrap();
        assert!(close(curve.position(0.0), [2.0, 0.5], 1e-15));
        assert!(TrigSeries::<f64>::parse("x: 1 2\n").is_err());
        assert!(TrigSeries::<f64>::parse("x: 1 a\ny: 1\n").is_err());
        assert!(matches!(
            BoundaryCurve::<f64>::from_name("square"),
            Err(Error::UnknownShape(_))
        ));
        let c = BoundaryCurve::<f64>::from_name("circle:2.5").unwrap();
        assert!(close(c.position(0.0), [2.5, 0.0], 1e-15));
    }

    #[test]
    fn curvature_of_circle() {
        let c = preset_curve(Preset::Circle(2.0)).unwrap();
        let s = sample_curve(&c, &[0.3f64]).unwrap();
        assert!((s.nodes[0].curvature() - 0.5).abs() < 1e-14);
    }
}
