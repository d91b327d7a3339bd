use std::fmt::Write as _;
use std::path::Path;
use std::time::Instant;

use ldsm_core::disk::{far_field_error, DiskScatterer};
use ldsm_core::forward::{Discretization, FaceGeometry, ForwardSolver, Medium};
use ldsm_core::geometry::BoundaryCurve;
use ldsm_core::ldsm::{
    build_fsharp, imaging_grid, reconstruct, NodeScheme, NoiseNorm, ReconstructionConfig, Region,
};
use ldsm_core::{Cx, Error, FarFieldMatrix64, Medium64};

use crate::error::CliError;
use crate::{
    DiskVerifyArgs, ForwardArgs, GeometryArg, ImageArgs, MediumArgs, NoiseNormArg, SchemeArg, TableFormat,
};

/// Sample count of the reported sup-residual of the filter polynomial.
const DENSE_SAMPLES: usize = 2001;

fn medium(k: f64, m: &MediumArgs) -> Result<Medium64, CliError> {
    Ok(Medium::new(k, Cx::new(m.n_re, m.n_im), Cx::new(m.eta_re, m.eta_im))?)
}

fn discretization(nf: usize, geometry: GeometryArg) -> Result<Discretization<f64>, CliError> {
    let g = match geometry {
        GeometryArg::Quadratic => FaceGeometry::Quadratic,
        GeometryArg::Exact => FaceGeometry::Exact,
    };
    Ok(Discretization::new(nf)?.with_geometry(g))
}

fn complex(z: Cx<f64>) -> String {
    format!("{}{:+}i", z.re, z.im)
}

fn io_error(path: &Path, e: Error) -> CliError {
    match CliError::from(e) {
        CliError::Io(msg) => CliError::Io(format!("{}: {msg}", path.display())),
        other => other,
    }
}

pub fn forward(a: &ForwardArgs) -> Result<(), CliError> {
    let curve = BoundaryCurve::<f64>::from_name(&a.shape)?;
    let medium = medium(a.k, &a.medium)?;
    let disc = discretization(a.nf, a.geometry)?;
    if a.dirs < 2 {
        return Err(CliError::Usage(format!("--dirs must be >= 2, got {}", a.dirs)));
    }
    if medium.is_vacuum() {
        eprintln!(
            "warning: n = 1 and eta = 0 describe no scatterer; the far field holds discretization error only"
        );
    }
    let start = Instant::now();
    let solver = ForwardSolver::new(&curve, &medium, &disc)?;
    let ff = solver.far_field_matrix(a.dirs)?;
    let mut residual: f64 = 0.0;
    for d in ff.directions() {
        residual = residual.max(solver.solve(d)?.residual);
    }
    let elapsed = start.elapsed().as_secs_f64();
    let fsharp = build_fsharp(&ff.entries)?;
    ff.save(&a.out).map_err(|e| io_error(&a.out, e))?;

    println!("shape              {}", curve.name());
    println!("k                  {}", medium.k);
    println!("n                  {}", complex(medium.n));
    println!("eta                {}", complex(medium.eta));
    println!("faces              {} ({} collocation nodes)", disc.faces(), disc.node_count());
    println!("directions         {}", ff.n());
    println!("pivot ratio        {:.3e}", solver.pivot_ratio());
    println!("max rel. residual  {residual:.3e}");
    println!("max |u_inf|        {:.6e}", ff.entries.max_abs());
    println!("lambda_1(F#)       {:.10e}", fsharp.lambda1);
    println!("solve time         {elapsed:.2} s");
    println!("wrote {}", a.out.display());
    Ok(())
}

/// Disk validation error of one cell; `None` when the oracle or the solver fails.
fn disk_cell(a: &DiskVerifyArgs, k: f64, nf: usize) -> Result<Option<f64>, CliError> {
    let medium = medium(k, &a.medium)?;
    let disk = DiskScatterer::new(a.radius, medium)?;
    let curve = BoundaryCurve::<f64>::from_name(&format!("circle:{}", a.radius))?;
    let disc = discretization(nf, a.geometry)?;
    let ff = ForwardSolver::new(&curve, &medium, &disc).and_then(|s| s.far_field_matrix(a.dirs));
    let ff = match ff {
        Ok(ff) => ff,
        Err(e @ Error::Forward { .. }) => {
            eprintln!("k = {k}, Nf = {nf}: {e}");
            return Ok(None);
        }
        Err(e) => return Err(e.into()),
    };
    match far_field_error(&ff, &disk) {
        Ok(eps) => Ok(Some(eps)),
        Err(e @ (Error::Resonance { .. } | Error::Truncation { .. })) => {
            eprintln!("k = {k}, Nf = {nf}: {e}");
            Ok(None)
        }
        Err(e) => Err(e.into()),
    }
}

fn cell_text(v: Option<f64>) -> String {
    v.map_or_else(|| "NA".to_string(), |e| format!("{e:.16e}"))
}

pub fn disk_verify(a: &DiskVerifyArgs) -> Result<(), CliError> {
    if a.k.is_empty() || a.nf.is_empty() {
        return Err(CliError::Usage("need at least one wavenumber and one face count".into()));
    }
    if a.dirs < 2 {
        return Err(CliError::Usage(format!("--dirs must be >= 2, got {}", a.dirs)));
    }
    // validate every parameter before the first solve
    for &k in &a.k {
        DiskScatterer::new(a.radius, medium(k, &a.medium)?)?;
    }
    for &nf in &a.nf {
        Discretization::<f64>::new(nf)?;
    }

    let mut cells = Vec::with_capacity(a.k.len() * a.nf.len());
    for &nf in &a.nf {
        for &k in &a.k {
            cells.push((k, nf, disk_cell(a, k, nf)?));
        }
    }

    let mut csv = String::from("k,Nf,eps\n");
    for &k in &a.k {
        for (_, nf, eps) in cells.iter().filter(|c| c.0 == k) {
            let _ = writeln!(csv, "{k},{nf},{}", cell_text(*eps));
        }
    }

    if matches!(a.format, TableFormat::Table | TableFormat::Both) {
        let mut header = format!("{:>6}", "Nf");
        for &k in &a.k {
            header.push_str(&format!(" {:>12}", format!("k={k}")));
        }
        println!("{header}");
        for &nf in &a.nf {
            let mut row = format!("{nf:>6}");
            for (_, _, eps) in cells.iter().filter(|c| c.1 == nf) {
                let text = eps.map_or_else(|| "NA".to_string(), |e| format!("{e:.5e}"));
                row.push_str(&format!(" {text:>12}"));
            }
            println!("{row}");
        }
    }
    if a.format == TableFormat::Both {
        println!();
    }
    if matches!(a.format, TableFormat::Csv | TableFormat::Both) {
        print!("{csv}");
    }
    if let Some(path) = &a.csv {
        std::fs::write(path, &csv).map_err(|e| CliError::Io(format!("{}: {e}", path.display())))?;
    }
    Ok(())
}

pub fn image(a: &ImageArgs) -> Result<(), CliError> {
    if !(a.delta >= 0.0 && a.delta < 1.0) {
        return Err(CliError::Usage(format!("--delta must lie in [0, 1), got {}", a.delta)));
    }
    if !(a.beta_frac > 0.0 && a.beta_frac < 1.0) {
        return Err(CliError::Usage(format!("--beta-frac must lie in (0, 1), got {}", a.beta_frac)));
    }
    if a.degree == 0 {
        return Err(CliError::Usage("--degree must be >= 1".into()));
    }
    if a.r == Some(0) {
        return Err(CliError::Usage("--r must be >= 1".into()));
    }
    let g = a.grid;
    let region = Region::new(g.x0, g.x1, g.y0, g.y1)?;
    if g.res < 2 {
        return Err(CliError::Usage(format!("grid resolution must be >= 2, got {}", g.res)));
    }

    let ff = FarFieldMatrix64::load(&a.input).map_err(|e| io_error(&a.input, e))?;
    let config = ReconstructionConfig {
        delta: a.delta,
        seed: a.seed,
        noise_norm: match a.noise_norm {
            NoiseNormArg::Spectral => NoiseNorm::Spectral,
            NoiseNormArg::Frobenius => NoiseNorm::Frobenius,
        },
        scheme: match a.scheme {
            SchemeArg::Equi => NodeScheme::Equispaced100,
            SchemeArg::Sv => NodeScheme::SingularValues,
            SchemeArg::Gauss => NodeScheme::Gauss32,
        },
        degree: a.degree,
        beta_fraction: a.beta_frac,
        r: a.r,
    };
    let rec = reconstruct(&ff, &config)?;
    let grid = imaging_grid(&rec.fsharp, &rec.poly, ff.k, &ff.directions(), region, g.res, a.exponent)?;
    let pgm = a.out.with_extension("pgm");
    grid.save_csv(&a.out).map_err(|e| io_error(&a.out, e))?;
    grid.save_pgm(&pgm).map_err(|e| io_error(&pgm, e))?;

    let spec = &rec.poly.spec;
    let am = grid.argmax();
    println!("k                  {}", ff.k);
    println!("directions         {}", ff.n());
    println!("delta              {}", a.delta);
    println!("lambda_1           {:.10e}", rec.fsharp.lambda1);
    println!("beta               {:.10e}", spec.beta);
    println!("r                  {}", spec.r);
    println!("scheme             {} ({} nodes, degree {})", spec.scheme.name(), rec.poly.nodes.len(), spec.degree);
    println!("node residual      {:.3e}", rec.poly.max_node_residual);
    println!("sup residual       {:.3e}", rec.poly.dense_residual(rec.fsharp.lambda1, DENSE_SAMPLES));
    println!("argmax             ({:.4}, {:.4})", am[0], am[1]);
    println!("wrote {}", a.out.display());
    println!("wrote {}", pgm.display());
    Ok(())
}
