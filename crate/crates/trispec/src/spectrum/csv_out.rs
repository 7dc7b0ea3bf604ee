//! CSV and plot-data exports.
//!
//! All quantities are deterministic functions of the cache, so repeated
//! exports from the same cache are byte-identical.

use super::{ConjugateTag, SpectrumReport};
use crate::interval::rat_to_f64;
use std::collections::HashMap;
use std::io::Write;
use std::path::{Path, PathBuf};

/// Write spectrum.csv, clustering.csv, egmm.csv and the two-column plot
/// files. Returns the paths written.
pub fn write_all(report: &SpectrumReport, out_dir: &Path) -> crate::Result<Vec<PathBuf>> {
    std::fs::create_dir_all(out_dir)?;
    let mut written = Vec::new();

    // sigma-conjugate data is defined on the squares trace set
    let mut sigma_by_trace: HashMap<String, (f64, String)> = HashMap::new();
    if let Some(galois) = &report.galois {
        for (e, (_, tag)) in report.trace_set_squares.entries.iter().zip(&galois.tags) {
            let key = serde_json::to_string(&e.trace.to_serialized())?;
            let sigma_abs = e.conjugates
                .iter()
                .enumerate()
                .filter(|(i, _)| *i != e.trace.field().identity_index())
                .map(|(_, iv)| rat_to_f64(&iv.midpoint()).abs())
                .fold(0.0f64, f64::max);
            let margin = match tag {
                ConjugateTag::BoundedConjugate => "bounded_conjugate".to_string(),
                ConjugateTag::Hyperbolic { delta_lo } => format!("{delta_lo:.12}"),
            };
            sigma_by_trace.insert(key, (sigma_abs, margin));
        }
    }

    // spectrum.csv: length, trace serialization, multiplicity,
    // sigma_conjugate_abs, delta_margin
    let path = out_dir.join("spectrum.csv");
    {
        let mut w = csv::Writer::from_path(&path).map_err(csv_err)?;
        w.write_record(["length", "trace", "multiplicity", "sigma_conjugate_abs", "delta_margin"])
            .map_err(csv_err)?;
        for e in &report.trace_set_all.entries {
            let t = rat_to_f64(&e.conjugates[e.trace.field().identity_index()].midpoint());
            let length = 2.0 * (t / 2.0).acosh();
            let trace_json = serde_json::to_string(&e.trace.to_serialized())?;
            let (sigma, margin) = sigma_by_trace
                .get(&trace_json)
                .map(|(s, m)| (format!("{s:.12}"), m.clone()))
                .unwrap_or_default();
            w.write_record([
                format!("{length:.12}"),
                trace_json,
                e.class_multiplicity.to_string(),
                sigma,
                margin,
            ])
            .map_err(csv_err)?;
        }
        w.flush()?;
    }
    written.push(path);

    // clustering.csv: n, count
    let path = out_dir.join("clustering.csv");
    {
        let mut w = csv::Writer::from_path(&path).map_err(csv_err)?;
        w.write_record(["n", "count"]).map_err(csv_err)?;
        for (n, c) in report.clustering.n_values.iter().zip(&report.clustering.counts) {
            w.write_record([n.to_string(), c.to_string()]).map_err(csv_err)?;
        }
        w.flush()?;
    }
    written.push(path);

    // egmm.csv: ell, N, Nprime, mean_mult
    let path = out_dir.join("egmm.csv");
    {
        let mut w = csv::Writer::from_path(&path).map_err(csv_err)?;
        w.write_record(["ell", "N", "Nprime", "mean_mult"]).map_err(csv_err)?;
        for (k, ell) in report.table.ell.iter().enumerate() {
            let g = report.table.mean_mult[k]
                .map(|g| format!("{g:.12}"))
                .unwrap_or_default();
            w.write_record([
                format!("{:.12}", rat_to_f64(ell)),
                report.table.n_primitive_unoriented[k].to_string(),
                report.table.n_prime[k].to_string(),
                g,
            ])
            .map_err(csv_err)?;
        }
        w.flush()?;
    }
    written.push(path);

    // plot data: two-column whitespace-separated text
    let path = out_dir.join("ell_vs_log_mean_mult.dat");
    {
        let mut f = std::fs::File::create(&path)?;
        for (k, ell) in report.table.ell_f64().iter().enumerate() {
            if let Some(g) = report.table.mean_mult[k] {
                if g > 0.0 {
                    writeln!(f, "{ell:.12} {:.12}", g.ln())?;
                }
            }
        }
    }
    written.push(path);

    let path = out_dir.join("logT_vs_logLprime.dat");
    {
        let mut f = std::fs::File::create(&path)?;
        for (ell, _, l_prime) in &report.distinct_length.rows {
            if *l_prime > 0 {
                let t = 2.0 * (ell / 2.0).cosh();
                writeln!(f, "{:.12} {:.12}", t.ln(), (*l_prime as f64).ln())?;
            }
        }
    }
    written.push(path);

    let path = out_dir.join("n_vs_count.dat");
    {
        let mut f = std::fs::File::create(&path)?;
        for (n, c) in report.clustering.n_values.iter().zip(&report.clustering.counts) {
            writeln!(f, "{n} {c}")?;
        }
    }
    written.push(path);

    Ok(written)
}

fn csv_err(e: csv::Error) -> crate::Error {
    crate::Error::Serde(e.to_string())
}
