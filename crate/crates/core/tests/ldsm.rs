use ldsm_core::disk::{analytic_matrix, far_field_error, DiskScatterer};
use ldsm_core::farfield::{directions, FarFieldMatrix};
use ldsm_core::forward::Medium;
use ldsm_core::ldsm::*;
use ldsm_core::linops::{spectral_norm, ComplexMatrix};
use ldsm_core::specfun::bessel_j_real;
use ldsm_core::Cx;
use nalgebra::DMatrix;
use proptest::prelude::*;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

type M = ComplexMatrix<f64>;

fn random(n: usize, seed: u64) -> M {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    M::from_fn(n, n, |_, _| Cx::new(rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0)))
}

fn to_na(a: &M) -> DMatrix<Cx<f64>> {
    DMatrix::from_fn(a.rows(), a.cols(), |i, j| a[(i, j)])
}

fn from_na(a: &DMatrix<Cx<f64>>) -> M {
    M::from_fn(a.nrows(), a.ncols(), |i, j| a[(i, j)])
}

/// `|A|` through nalgebra's Hermitian eigensolver.
fn na_abs(a: DMatrix<Cx<f64>>) -> DMatrix<Cx<f64>> {
    let e = nalgebra::SymmetricEigen::new(a);
    let d = DMatrix::from_diagonal(&e.eigenvalues.map(|l| Cx::new(l.abs(), 0.0)));
    &e.eigenvectors * d * e.eigenvectors.adjoint()
}

fn spec(beta: f64, r: u32, degree: usize) -> FilterSpec<f64> {
    FilterSpec::new(beta, r, 0.1, NodeScheme::Gauss32, degree, DEFAULT_CUTOFF).unwrap()
}

fn reference_disk(k: f64, n: Cx<f64>, eta: Cx<f64>) -> DiskScatterer<f64> {
    DiskScatterer::new(1.0, Medium::new(k, n, eta).unwrap()).unwrap()
}

#[test]
fn fsharp_matches_independent_eigensolver() {
    for seed in 0..3 {
        let f = random(64, seed);
        let fs = build_fsharp(&f).unwrap();
        let a = to_na(&f);
        let re = (&a + a.adjoint()) * Cx::new(0.5, 0.0);
        let im = (&a - a.adjoint()) * Cx::new(0.0, -0.5);
        let reference = from_na(&(na_abs(re) + na_abs(im)));
        let err = fs.matrix.sub(&reference).unwrap().max_abs();
        assert!(err <= 1e-10 * reference.max_abs(), "{err:e}");
        assert!(fs.raw_min_eigenvalue >= -1e-10 * fs.lambda1);
        assert!(fs.matrix.hermitian_defect() <= 1e-12 * fs.lambda1);
    }
}

#[test]
fn spectral_suite_on_random_matrices() {
    for seed in 100..120 {
        let f = random(64, seed);
        let fs = build_fsharp(&f).unwrap();
        assert!(fs.raw_min_eigenvalue >= -1e-10 * fs.lambda1);
        let back = fs.eig.reconstruct().sub(&fs.matrix).unwrap();
        assert!(spectral_norm(&back) <= 1e-10 * spectral_norm(&fs.matrix));
        let p = FilterPolynomial::from_coefficients(vec![0.0, 1.0], spec(0.5 / fs.lambda1, 1, 2));
        let v = random(64, seed + 1000).column(0);
        let applied = apply_polynomial(&fs, &p, &v).unwrap();
        let direct = fs.matrix.matvec(&fs.matrix.matvec(&v).unwrap()).unwrap();
        let scale = direct.iter().map(|x| x.norm()).fold(0.0, f64::max);
        let err = applied.iter().zip(&direct).map(|(a, b)| (a - b).norm()).fold(0.0, f64::max);
        assert!(err <= 1e-10 * scale, "{err:e}");
    }
}

#[test]
fn apply_polynomial_on_scalar_operators() {
    let v = random(6, 9).column(2);
    let id = FSharp::from_hermitian(&M::identity(6)).unwrap();
    let p = FilterPolynomial::from_coefficients(vec![1.0], spec(0.5, 1, 1));
    let out = apply_polynomial(&id, &p, &v).unwrap();
    assert!(out.iter().zip(&v).all(|(a, b)| (a - b).norm() < 1e-14));

    let c = 1.7;
    let fs = FSharp::from_hermitian(&M::identity(6).scale(Cx::new(c, 0.0))).unwrap();
    let p = FilterPolynomial::from_coefficients(vec![0.3, -0.2, 0.05], spec(0.5, 1, 3));
    let out = apply_polynomial(&fs, &p, &v).unwrap();
    let pc = p.eval(c);
    assert!(out.iter().zip(&v).all(|(a, b)| (a - b * pc).norm() < 1e-13));
}

#[test]
fn funk_hecke_quadrature() {
    let dirs = directions::<f64>(64);
    let mut rng = ChaCha8Rng::seed_from_u64(4);
    for _ in 0..100 {
        let k = rng.gen_range(0.5..8.0);
        let x = [rng.gen_range(-2.0..2.0), rng.gen_range(-2.0..2.0)];
        let dist = rng.gen_range(0.0..10.0 / k);
        let angle: f64 = rng.gen_range(0.0..std::f64::consts::TAU);
        let z = [x[0] + dist * angle.cos(), x[1] + dist * angle.sin()];
        let pz = phi_z(k, &dirs, z);
        let px = phi_z(k, &dirs, x);
        // sum_i e^{-ik(z - x).d_i}
        let sum: Cx<f64> = pz.iter().zip(&px).map(|(a, b)| a * b.conj()).sum();
        let lhs = sum * (std::f64::consts::TAU / 64.0);
        let rhs = std::f64::consts::TAU * bessel_j_real(0, k * dist).unwrap();
        assert!((lhs - Cx::new(rhs, 0.0)).norm() <= 1e-8, "k|x-z| = {}", k * dist);
    }
}

#[test]
fn noise_injection() {
    let disk = reference_disk(2.0, Cx::new(4.0, 1.0), Cx::new(2.0, 1.0));
    let f = analytic_matrix(&disk, 64).unwrap();
    let same = add_noise(&f, 0.0, 5, NoiseNorm::Spectral).unwrap();
    assert_eq!(same.far_field, f);

    let delta = 0.1;
    let noisy = add_noise(&f, delta, 5, NoiseNorm::Spectral).unwrap();
    assert!((spectral_norm(&noisy.noise) - 1.0).abs() < 1e-10);
    let emax = noisy.noise.max_abs();
    for i in 0..64 {
        for j in 0..64 {
            let rel = (noisy.far_field.entries[(i, j)] / f.entries[(i, j)] - 1.0).norm();
            let expected = delta * noisy.noise[(i, j)].norm();
            assert!((rel - expected).abs() < 1e-12);
            assert!(rel <= delta * emax * (1.0 + 1e-12));
        }
    }
    assert_eq!(add_noise(&f, delta, 5, NoiseNorm::Spectral).unwrap(), noisy);
    assert!(add_noise(&f, 1.0, 5, NoiseNorm::Spectral).is_err());
    assert!(add_noise(&f, -0.1, 5, NoiseNorm::Spectral).is_err());
}

#[test]
fn disk_error_scales_with_noise_level() {
    let disk = reference_disk(2.0, Cx::new(4.0, 1.0), Cx::new(2.0, 1.0));
    let f = analytic_matrix(&disk, 64).unwrap();
    let err = |delta: f64| {
        let noisy = add_noise(&f, delta, 11, NoiseNorm::Spectral).unwrap().far_field;
        far_field_error(&noisy, &disk).unwrap()
    };
    let (a, b) = (err(0.01), err(0.02));
    assert!(a > 0.0);
    assert!((b / a - 2.0).abs() < 1e-8);
    assert!(a <= 0.01 * spectral_norm(&f.entries) * 64.0);
}

#[test]
fn disk_image_decays_away_from_scatterer() {
    let disk = reference_disk(4.0, Cx::new(3.0, 0.0), Cx::new(6.0, 4.0));
    let f = analytic_matrix(&disk, 64).unwrap();
    let rec = reconstruct(&f, &ReconstructionConfig { delta: 0.15, seed: 2, ..Default::default() }).unwrap();
    let dirs = f.directions();
    let w = |z: [f64; 2]| imaging_value(&rec.fsharp, &rec.poly, f.k, &dirs, z, 4).unwrap();
    let ring: f64 = (0..200)
        .map(|i| {
            let t = std::f64::consts::TAU * i as f64 / 200.0;
            w([4.0 * t.cos(), 4.0 * t.sin()])
        })
        .sum::<f64>()
        / 200.0;
    let mut inside = Vec::new();
    for i in 0..21 {
        for j in 0..21 {
            let z = [-1.0 + 0.1 * i as f64, -1.0 + 0.1 * j as f64];
            if z[0] * z[0] + z[1] * z[1] <= 1.0 {
                inside.push(w(z));
            }
        }
    }
    let mean = inside.iter().sum::<f64>() / inside.len() as f64;
    assert!(ring <= 0.2 * mean, "ring {ring:e} vs disk {mean:e}");
}

#[test]
fn grid_is_deterministic_and_nonnegative() {
    let disk = reference_disk(4.0, Cx::new(3.0, 0.0), Cx::new(6.0, 4.0));
    let f = analytic_matrix(&disk, 32).unwrap();
    let cfg = ReconstructionConfig { delta: 0.1, seed: 9, scheme: NodeScheme::SingularValues, ..Default::default() };
    let run = || {
        let rec = reconstruct(&f, &cfg).unwrap();
        imaging_grid(&rec.fsharp, &rec.poly, f.k, &f.directions(), Region::default(), 40, 4).unwrap()
    };
    let (a, b) = (run(), run());
    assert_eq!(a.values.len(), 1600);
    assert!(a.values.iter().zip(&b.values).all(|(x, y)| x.to_bits() == y.to_bits()));
    assert!(a.values.iter().all(|&w| w >= 0.0));
    let mut ca = Vec::new();
    let mut cb = Vec::new();
    a.write_csv(&mut ca).unwrap();
    b.write_csv(&mut cb).unwrap();
    assert_eq!(ca, cb);
}

#[test]
fn noiseless_image_ignores_seed() {
    let disk = reference_disk(3.0, Cx::new(2.0, 0.5), Cx::new(1.0, 1.0));
    let f = analytic_matrix(&disk, 32).unwrap();
    let image = |seed| {
        let rec = reconstruct(&f, &ReconstructionConfig { seed, ..Default::default() }).unwrap();
        imaging_grid(&rec.fsharp, &rec.poly, f.k, &f.directions(), Region::default(), 12, 4).unwrap()
    };
    assert_eq!(image(1), image(2));
}

#[test]
fn discrepancy_rule_stops_at_noise_level() {
    for (lambda1, frac, delta) in [(1.0, 0.5, 0.1), (4.0, 0.8, 0.05), (217.0, 0.9, 0.1), (20.0, 0.3, 0.01), (0.5, 0.9, 0.001)] {
        let beta = frac / lambda1;
        let r = choose_r(lambda1, beta, delta).unwrap();
        let increment = |r: u32| gamma_filter(lambda1, beta, r + 1) - gamma_filter(lambda1, beta, r);
        assert!(increment(r) <= delta * (1.0 + 1e-12), "r = {r}");
        if r > 1 {
            assert!(increment(r - 1) > delta);
        }
    }
}

#[test]
fn surrogate_converges_to_inverse_square_root() {
    let lambda1: f64 = 3.0;
    let beta = 0.9 / lambda1;
    let t = lambda1 / 2.0;
    assert!(beta * t >= 0.1);
    assert!((gamma_filter(t, beta, 500) - 1.0 / t.sqrt()).abs() <= 1e-3);
}

#[test]
fn fit_with_every_scheme() {
    let f = random(32, 77);
    let fs = build_fsharp(&f).unwrap();
    for scheme in [NodeScheme::Equispaced100, NodeScheme::SingularValues, NodeScheme::Gauss32] {
        let s = FilterSpec::from_data(&fs, 0.1, 0.9, scheme, 4).unwrap();
        let p = fit_filter_polynomial(&s, &fs).unwrap();
        assert_eq!(p.degree(), 4);
        assert!(p.nodes.iter().all(|&t| t > 0.0 && t <= fs.lambda1));
        assert!(p.max_node_residual.is_finite());
        assert_eq!(p.eval(0.0), 0.0);
    }
}

#[test]
fn invalid_filter_parameters() {
    assert!(FilterSpec::new(0.0, 1, 0.1, NodeScheme::Gauss32, 4, 1e-8).is_err());
    assert!(FilterSpec::new(0.1, 0, 0.1, NodeScheme::Gauss32, 4, 1e-8).is_err());
    assert!(FilterSpec::new(0.1, 1, 0.1, NodeScheme::Gauss32, 0, 1e-8).is_err());
    let fs = FSharp::from_hermitian(&M::identity(4)).unwrap();
    assert!(FilterSpec::from_data(&fs, 0.1, 1.0, NodeScheme::Gauss32, 4).is_err());
    assert!(FilterSpec::from_data(&fs, 0.0, 0.5, NodeScheme::Gauss32, 4).is_err());
    let zero = FSharp::from_hermitian(&M::zeros(4, 4)).unwrap();
    assert!(FilterSpec::from_data(&zero, 0.1, 0.5, NodeScheme::Gauss32, 4).is_err());
    let ff = FarFieldMatrix::new(1.0, M::zeros(4, 4)).unwrap();
    assert!(reconstruct(&ff, &ReconstructionConfig::default()).is_err());
}

proptest! {
    #[test]
    fn bernoulli_bound(r in 1u32..=10, beta in 0.05f64..1.0) {
        for i in 0..1000 {
            let t = 2.0 * i as f64 / 999.0;
            if beta * t > 1.0 {
                break;
            }
            prop_assert!(gamma_filter(t, beta, r) <= r as f64 * beta * t.sqrt() * (1.0 + 1e-12) + 1e-15);
        }
    }

    #[test]
    fn gamma_is_monotone_in_r(r in 1u32..10, beta in 0.01f64..2.0, s in 0.0f64..1.0) {
        let t = s / beta;
        prop_assert!(gamma_filter(t, beta, r + 1) >= gamma_filter(t, beta, r));
    }

    #[test]
    fn chosen_r_is_at_least_one(lambda1 in 0.01f64..500.0, frac in 0.01f64..0.99, delta in 1e-4f64..0.99) {
        let r = choose_r(lambda1, frac / lambda1, delta).unwrap();
        prop_assert!(r >= 1);
    }

    #[test]
    fn apply_polynomial_is_linear(seed in 0u64..1000, a_re in -2.0f64..2.0, b_im in -2.0f64..2.0) {
        let fs = build_fsharp(&random(12, seed)).unwrap();
        let p = FilterPolynomial::from_coefficients(vec![0.7, -0.2, 0.01, 0.003], spec(0.5 / fs.lambda1, 2, 4));
        let u = random(12, seed + 1).column(0);
        let v = random(12, seed + 2).column(1);
        let (alpha, beta) = (Cx::new(a_re, 0.3), Cx::new(-0.4, b_im));
        let combo: Vec<Cx<f64>> = u.iter().zip(&v).map(|(x, y)| alpha * x + beta * y).collect();
        let lhs = apply_polynomial(&fs, &p, &combo).unwrap();
        let pu = apply_polynomial(&fs, &p, &u).unwrap();
        let pv = apply_polynomial(&fs, &p, &v).unwrap();
        let scale = pu.iter().chain(&pv).map(|x| x.norm()).fold(1.0, f64::max) * 4.0;
        for i in 0..12 {
            prop_assert!((lhs[i] - (alpha * pu[i] + beta * pv[i])).norm() <= 1e-12 * scale);
        }
    }

    #[test]
    fn phi_z_has_unit_entries(x in -5.0f64..5.0, y in -5.0f64..5.0, k in 0.1f64..20.0) {
        let v = phi_z(k, &directions::<f64>(64), [x, y]);
        let sq: f64 = v.iter().map(|e| e.norm_sqr()).sum();
        prop_assert!((sq - 64.0).abs() < 1e-11);
    }
}
