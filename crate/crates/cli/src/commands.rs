use std::f64::consts::PI;
use std::fs::File;
use std::io::{BufReader, BufWriter, Write};
use std::path::Path;
use std::sync::Arc;

use rayon::prelude::*;
use statrs::distribution::{ChiSquared, ContinuousCDF};
use tomostat::estimators::{
    bhd_variance_displaced, empirical_estimate_bhd, write_report_csv, Comparison, VarianceReport,
};
use tomostat::observables::{FilterSpec, OperatorSpec};
use tomostat::pattern::build_table;
use tomostat::simulate::{sample_quadratures, QuadratureSampleSet};

use crate::config::{RunConfig, SchemeName};
use crate::exit::CliError;

pub fn create(path: &Path) -> Result<BufWriter<File>, CliError> {
    if let Some(dir) = path.parent().filter(|d| !d.as_os_str().is_empty()) {
        std::fs::create_dir_all(dir).map_err(|e| CliError::Io(format!("{}: {e}", dir.display())))?;
    }
    File::create(path).map(BufWriter::new).map_err(|e| CliError::Io(format!("{}: {e}", path.display())))
}

/// p-value of a chi-square test that the phases are uniform on `[0, π)`,
/// or `None` when there are too few records for 5 expected counts per bin.
pub fn phase_uniformity(set: &QuadratureSampleSet) -> Option<f64> {
    let bins = (set.len() / 5).min(20);
    if bins < 2 {
        return None;
    }
    let mut counts = vec![0usize; bins];
    for s in &set.samples {
        counts[((s.phi / PI * bins as f64) as usize).min(bins - 1)] += 1;
    }
    let expected = set.len() as f64 / bins as f64;
    let chi2: f64 = counts.iter().map(|&k| (k as f64 - expected).powi(2) / expected).sum();
    Some(1.0 - ChiSquared::new((bins - 1) as f64).ok()?.cdf(chi2))
}

pub fn simulate(cfg: &RunConfig, out: &Path) -> Result<(), CliError> {
    let set = sample_quadratures(&cfg.experiment()?)?;
    let mut w = create(out)?;
    set.write_to(&mut w)?;
    w.flush()?;
    let p = phase_uniformity(&set).map_or("n/a".to_string(), |p| format!("{p:.4}"));
    println!("wrote {} records to {}", set.len(), out.display());
    println!("N={} seed={} phase_uniformity_p={p}", set.len(), set.seed);
    Ok(())
}

pub fn filter(cfg: &RunConfig) -> Result<Arc<FilterSpec>, CliError> {
    Ok(Arc::new(FilterSpec::new(cfg.filter.width)?))
}

/// The operator whose pattern function is applied to detected quadratures.
fn detected_operator(cfg: &RunConfig) -> Result<OperatorSpec, CliError> {
    let setup = cfg.setup();
    let kernel = setup.detected_kernel(filter(cfg)?)?;
    Ok(OperatorSpec::new(kernel, setup.detected_displacement()))
}

pub fn estimate(cfg: &RunConfig, samples: &Path) -> Result<(), CliError> {
    let file = File::open(samples).map_err(|e| CliError::Io(format!("{}: {e}", samples.display())))?;
    let set = QuadratureSampleSet::read_from(BufReader::new(file))?;
    let op = detected_operator(cfg)?;
    let (lo, hi) = set
        .samples
        .iter()
        .fold((f64::INFINITY, f64::NEG_INFINITY), |(lo, hi), s| (lo.min(s.x), hi.max(s.x)));
    let table = build_table(&op, (lo - 0.05, hi + 0.05), 0.01)?;
    let e = empirical_estimate_bhd(&set, &table)?;
    let alpha = cfg.alpha();
    println!("alpha_re={}", alpha.re);
    println!("alpha_im={}", alpha.im);
    println!("estimate={}", e.mean);
    println!("per_sample_variance={}", e.per_sample_variance);
    println!("std_error={}", e.std_error);
    println!("significance={}", e.significance());
    println!("N={}", e.n);
    println!("method={:?}", e.method);
    Ok(())
}

pub fn theory(cfg: &RunConfig) -> Result<(), CliError> {
    let state = cfg.state()?;
    let alpha = cfg.alpha();
    let e = &cfg.experiment;
    let cmp = Comparison::with_efficiency(filter(cfg)?, e.n_max, e.n_qm, e.eta)?;
    let r = cmp.report(&state, alpha, e.n)?;
    println!("alpha_re={}", alpha.re);
    println!("alpha_im={}", alpha.im);
    println!("P={}", r.p);
    println!("sigma_qm={}", r.sigma_qm);
    println!("sigma_bhd={}", r.sigma_bhd);
    println!("sigma_unbalanced={}", r.sigma_unbalanced);
    println!("significance_bhd={}", r.p.abs() / r.sigma_bhd);
    println!("significance_unbalanced={}", r.p.abs() / r.sigma_unbalanced);
    if e.scheme == SchemeName::Cascaded {
        let m = bhd_variance_displaced(&state, &cfg.setup(), filter(cfg)?)?;
        println!("sigma_cascaded={}", m.std_error(e.n));
    }
    println!("N={}", e.n);
    Ok(())
}

/// One report per grid point, in grid order.
pub fn scan(cfg: &RunConfig, cmp: &Comparison) -> Result<Vec<VarianceReport>, CliError> {
    let state = cfg.state()?;
    let points = cfg.grid_points();
    let rows: Vec<_> = points.par_iter().map(|&a| cmp.report(&state, a, cfg.experiment.n)).collect();
    rows.into_iter().map(|r| r.map_err(CliError::from)).collect()
}

pub fn compare(cfg: &RunConfig, out: Option<&Path>) -> Result<(), CliError> {
    let e = &cfg.experiment;
    let cmp = Comparison::with_efficiency(filter(cfg)?, e.n_max, e.n_qm, e.eta)?;
    let rows = scan(cfg, &cmp)?;
    match out {
        Some(path) => {
            let mut w = create(path)?;
            write_report_csv(&rows, &mut w)?;
            w.flush()?;
            println!("wrote {} rows to {}", rows.len(), path.display());
        }
        None => write_report_csv(&rows, std::io::stdout().lock())?,
    }
    Ok(())
}
