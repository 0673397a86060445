use std::fs;
use std::path::Path;
use std::sync::Arc;

use anyhow::{anyhow, Context};
use rayon::prelude::*;
use restrictia::cubic;
use restrictia::field::{FieldData, FieldRecord};
use restrictia::lattice;
use restrictia::petersson::{self, InnerProductOptions, InnerProductResult};
use restrictia::qseries;
use restrictia::report::{self, float, TableRecord, TextReport};
use restrictia::restrict::{self, RestrictError, SlEngine};
use restrictia::scalar::{format_rational, is_integral, rational_to_f64};

use crate::cache::Cache;
use crate::config::{computation, Category, Failure, Format, RunConfig};

type Outcome = Result<String, Failure>;

pub fn run(cfg: &RunConfig) -> Outcome {
    match cfg {
        RunConfig::Tables { degree, ks, fields, out, format } => tables(*degree, ks, fields, out.as_deref(), *format),
        RunConfig::Zeta { field, k } => zeta(field, *k),
        RunConfig::VerifyKz { disc } => verify_kz(*disc),
        RunConfig::Cubic { field, max_index } => cubic_classes(field, *max_index),
        RunConfig::Petersson { field, k, max_index, n_terms, tol } => {
            petersson(field, *k, &InnerProductOptions { max_index: *max_index, n_terms: *n_terms, tol: *tol })
        }
        RunConfig::ThetaE8 { max_norm } => theta_e8(*max_norm),
        RunConfig::Eisenstein { weight } => eisenstein(*weight),
    }
}

fn pass(ok: bool) -> &'static str {
    if ok {
        "PASS"
    } else {
        "FAIL"
    }
}

fn load_field(path: &Path) -> Result<Arc<FieldData>, Failure> {
    FieldData::from_file(path).map_err(|e| Failure::new(Category::Validation, anyhow!("{}: {e}", path.display())))
}

fn write_atomic(path: &Path, contents: &str) -> anyhow::Result<()> {
    let dir = match path.parent() {
        Some(d) if !d.as_os_str().is_empty() => d.to_path_buf(),
        _ => std::path::PathBuf::from("."),
    };
    let name = path.file_name().ok_or_else(|| anyhow!("output path has no file name"))?.to_string_lossy();
    let tmp = dir.join(format!(".{name}.{}.tmp", std::process::id()));
    fs::write(&tmp, contents).with_context(|| format!("writing {}", tmp.display()))?;
    fs::rename(&tmp, path).with_context(|| format!("renaming into {}", path.display()))?;
    Ok(())
}

enum Entry {
    Record(FieldRecord),
    Unreadable(String, String),
}

fn scan_corpus(dir: &Path, degree: usize) -> Result<Vec<Entry>, Failure> {
    let mut paths: Vec<_> = fs::read_dir(dir)
        .with_context(|| format!("reading {}", dir.display()))
        .map_err(computation)?
        .filter_map(|e| e.ok().map(|e| e.path()))
        .filter(|p| p.extension().is_some_and(|x| x == "json"))
        .collect();
    paths.sort();
    let mut out = Vec::new();
    for p in paths {
        let name = p.file_stem().unwrap_or_default().to_string_lossy().into_owned();
        let parsed = fs::read_to_string(&p)
            .map_err(|e| e.to_string())
            .and_then(|s| serde_json::from_str::<FieldRecord>(&s).map_err(|e| e.to_string()));
        match parsed {
            Ok(rec) if rec.degree == degree => out.push(Entry::Record(rec)),
            Ok(_) => {}
            Err(e) => out.push(Entry::Unreadable(name, e)),
        }
    }
    Ok(out)
}

fn field_row(rec: &FieldRecord, ks: &[u32], cache: &Cache, verdict: bool) -> Result<TableRecord, (anyhow::Error, bool)> {
    let f = FieldData::from_record(rec).map_err(|e| (anyhow!(e), false))?;
    let engine = SlEngine::new(&f).map_err(|e| (anyhow!(e), false))?;
    let mut reports = Vec::new();
    for &k in ks {
        let (_, need) = restrict::required_l(f.degree(), k).map_err(|e| (anyhow!(e), false))?;
        let s = cache.s_values(&engine, k, need).map_err(|e| (e, false))?;
        let r = restrict::table_row_from(&f, k, &s).map_err(|e| {
            let mismatch = matches!(e, RestrictError::GuardMismatch { .. });
            (anyhow!(e).context(format!("k = {k}")), mismatch)
        })?;
        reports.push(r);
    }
    let verdict = if verdict {
        reports.iter().find(|r| r.k == 2).map(|r| restrict::niemeier_verdict(&r.coords[1]))
    } else {
        None
    };
    Ok(TableRecord { label: f.label().to_string(), disc: f.disc().clone(), reports, verdict, error: None })
}

fn tables(degree: usize, ks: &[u32], dir: &Path, out: Option<&Path>, format: Format) -> Outcome {
    let entries = scan_corpus(dir, degree)?;
    let cache = Cache::from_env();
    let with_verdict = degree == 6 && ks.contains(&2);
    let mut unreadable = Vec::new();
    let mut recs = Vec::new();
    for e in entries {
        match e {
            Entry::Record(r) => recs.push(r),
            Entry::Unreadable(name, err) => unreadable.push((name, err)),
        }
    }
    for (name, err) in &unreadable {
        eprintln!("warning[computation]: skipping {name}: {err}");
    }
    if recs.is_empty() {
        eprintln!("warning[validation]: no degree {degree} fields in {}", dir.display());
    }
    let results: Vec<(TableRecord, bool)> = recs
        .par_iter()
        .map(|rec| match field_row(rec, ks, &cache, with_verdict) {
            Ok(r) => (r, false),
            Err((e, mismatch)) => {
                eprintln!("warning[{}]: {}: {e:#}", if mismatch { "mismatch" } else { "computation" }, rec.label);
                let err = TableRecord {
                    label: rec.label.clone(),
                    disc: rec.disc.into(),
                    reports: Vec::new(),
                    verdict: None,
                    error: Some(format!("{e:#}")),
                };
                (err, mismatch)
            }
        })
        .collect();
    let mismatch = results.iter().any(|r| r.1);
    let mut rows: Vec<TableRecord> = results.into_iter().map(|r| r.0).collect();
    rows.sort_by(|a, b| (&a.disc, &a.label).cmp(&(&b.disc, &b.label)));
    let failed = rows.iter().filter(|r| r.error.is_some()).count() + unreadable.len();
    let text = match format {
        Format::Csv => report::table_csv(degree, ks, with_verdict, &rows),
        Format::Txt => report::table_text(degree, ks, with_verdict, &rows),
    };
    let printed = match out {
        Some(p) => {
            write_atomic(p, &text).map_err(computation)?;
            String::new()
        }
        None => text,
    };
    if failed > 0 {
        let cat = if mismatch { Category::Mismatch } else { Category::Computation };
        return Err(Failure::new(cat, anyhow!("{failed} field(s) failed")).with_output(printed));
    }
    Ok(printed)
}

fn zeta(path: &Path, k: u32) -> Outcome {
    let f = load_field(path)?;
    let engine = SlEngine::new(&f).map_err(computation)?;
    let exact = restrict::siegel_zeta(&engine, k).map_err(computation)?;
    let x = cross_check(&f, k, &exact)?;
    let mut t = TextReport::new();
    t.section("zeta")
        .entry("field", f.label())
        .entry("disc", f.disc().to_string())
        .entry("k", k.to_string())
        .entry("zeta_exact", format_rational(&exact))
        .entry("method", "Siegel")
        .entry("zeta_numeric", float(x.numeric))
        .entry("rel_diff", float(x.rel_diff))
        .entry("rel_err_bound", float(x.rel_err))
        .entry("cross_check", pass(x.agrees()));
    let out = t.render();
    if !x.agrees() {
        return Err(Failure::new(Category::Mismatch, anyhow!("numeric ζ_F(1−k) disagrees with the exact value")).with_output(out));
    }
    Ok(out)
}

/// Tolerances tried in turn for the numeric ζ_F(1−k); small k converge slowly.
pub const ZETA_TOLS: [f64; 4] = [1e-10, 1e-8, 1e-6, 1e-4];

fn cross_check(f: &Arc<FieldData>, k: u32, exact: &restrictia::Rational) -> Result<restrict::ZetaCrossCheck, Failure> {
    let mut last = None;
    for tol in ZETA_TOLS {
        match restrict::zeta_cross_check(f, k, exact, tol) {
            Ok(x) => return Ok(x),
            Err(e) => last = Some(e),
        }
    }
    Err(computation(last.expect("at least one tolerance")))
}

pub const KZ_PREC: usize = 16;

fn verify_kz(disc: i64) -> Outcome {
    let f = FieldData::real_quadratic(disc).map_err(computation)?;
    let engine = SlEngine::new(&f).map_err(computation)?;
    let kz = restrict::verify_kz(&engine, KZ_PREC).map_err(computation)?;
    let mut t = TextReport::new();
    t.section("kohnen-zagier")
        .entry("disc", disc.to_string())
        .entry("c_D", format_rational(&kz.c_d))
        .entry("zeta_minus5", format_rational(&kz.zeta_m5))
        .entry("coefficients_checked", kz.coefficients_checked.to_string())
        .entry("identity", pass(kz.identity))
        .entry("zeta_ratio", float(kz.zeta_ratio))
        .entry("size_bound_0.01", pass(kz.zeta_ratio > 0.01))
        .entry("verdict", pass(kz.identity));
    let out = t.render();
    if !kz.identity {
        return Err(Failure::new(Category::Mismatch, anyhow!("weight 12 identity fails for D = {disc}")).with_output(out));
    }
    Ok(out)
}

fn cubic_classes(path: &Path, max_index: u64) -> Outcome {
    let f = load_field(path)?;
    let classes = cubic::enumerate_cusp_classes(&f, max_index).map_err(computation)?;
    let table = cubic::multiplicity_table(&f, &classes, max_index).map_err(computation)?;
    let mut s = cubic::cusp_classes_csv(&classes);
    s.push('\n');
    s.push_str("m,classes,orders,primitive_orders,iso_classes,aut_order,aut_rule,primitive_rule\n");
    for r in &table {
        s.push_str(&format!(
            "{},{},{},{},{},{},{},{}\n",
            r.index,
            r.classes,
            r.orders,
            r.primitive_orders,
            r.iso_classes,
            r.aut_order,
            pass(r.matches_aut_rule()),
            pass(r.matches_primitive_rule())
        ));
    }
    Ok(s)
}

/// Quadrature tolerance for ⟨Δ,Δ⟩.
pub const DELTA_TOL: f64 = 1e-12;

/// Relative gap allowed between the corrected class sum and the oracle.
pub const CORRECTED_REL_TOL: f64 = 0.05;

fn inner_section(t: &mut TextReport, r: &InnerProductResult, oracle: &InnerProductResult) -> bool {
    let diff = (r.value - oracle.value).norm();
    let allowed = r.tail_bound + oracle.tail_bound + 1e-6;
    let ok = diff <= allowed;
    t.section(r.method.name())
        .entry("value_re", float(r.value.re))
        .entry("value_im", float(r.value.im))
        .entry("method", r.method.name())
        .entry("truncation", format!("M={},N={}", r.truncation.0, r.truncation.1))
        .entry("classes", r.classes.to_string())
        .entry("tail_bound", float(r.tail_bound))
        .entry("abs_diff_vs_oracle", float(diff))
        .entry("allowed", float(allowed))
        .entry("ratio_vs_oracle", float(r.value.re / oracle.value.re))
        .entry("verdict", pass(ok));
    ok
}

fn petersson(path: &Path, k: u32, opts: &InnerProductOptions) -> Outcome {
    let f = load_field(path)?;
    let engine = SlEngine::new(&f).map_err(computation)?;
    let delta = petersson::delta_norm(DELTA_TOL).map_err(computation)?;
    let oracle = petersson::coefficient_oracle_d3(&engine, &delta).map_err(computation)?;
    let tau: Vec<f64> = petersson::ramanujan_tau(opts.n_terms).iter().map(|&x| x as f64).collect();
    let (printed, corrected) = petersson::inner_product_d3(&f, k, &tau, opts).map_err(computation)?;
    let row = restrict::table_row(&engine, k).map_err(computation)?;
    let b = &row.coords[1];
    let c1 = b + restrictia::scalar::rat_int(720);
    let disc = rational_to_f64(&restrictia::scalar::rat_big(f.disc().clone()));

    let mut t = TextReport::new();
    t.section("field").entry("label", f.label()).entry("disc", f.disc().to_string()).entry("k", k.to_string());
    t.section("delta_norm")
        .entry("value", float(delta.value))
        .entry("error", float(delta.error))
        .entry("method", "quadrature");
    t.section(oracle.method.name())
        .entry("value_re", float(oracle.value.re))
        .entry("method", oracle.method.name())
        .entry("tail_bound", float(oracle.tail_bound));
    let ok = inner_section(&mut t, &printed, &oracle);
    inner_section(&mut t, &corrected, &oracle);
    let rel = ((corrected.value.re - oracle.value.re) / oracle.value.re).abs();
    t.entry("rel_diff_vs_oracle", float(rel)).entry("rel_tol", float(CORRECTED_REL_TOL)).entry("rel_verdict", pass(rel <= CORRECTED_REL_TOL));

    let bound = 0.067 / disc;
    let inner = oracle.value.re.abs();
    t.section("independence")
        .entry("b", format_rational(b))
        .entry("c1", format_rational(&c1))
        .entry("c1_integral", is_integral(&c1).to_string())
        .entry("inner_abs", float(inner))
        .entry("bound", float(bound))
        .entry("verdict", pass(!is_integral(&c1) && inner < bound));

    let c4 = petersson::big_c_k(k).map_err(computation)?;
    let (gap, at) = petersson::niemeier_gap(delta.value);
    t.section("constants")
        .entry("C_k", float(c4))
        .entry("C_k_verdict", pass(c4 < 5.79))
        .entry("niemeier_gap_min", float(gap))
        .entry("niemeier_gap_at", at)
        .entry("niemeier_gap_verdict", pass(gap > 1.22e-6));
    let out = t.render();
    if !ok {
        return Err(Failure::new(Category::Mismatch, anyhow!("class sum disagrees with the coefficient oracle")).with_output(out));
    }
    Ok(out)
}

fn theta_e8(max_norm: u64) -> Outcome {
    let theta = lattice::theta_coefficients(&lattice::e8_gram(), max_norm).map_err(computation)?;
    let e4 = qseries::e4(max_norm as usize + 1);
    let ok = theta.len() == e4.prec()
        && theta.iter().zip(e4.coeffs()).all(|(&a, b)| restrictia::scalar::rat_int(a as i64) == *b);
    let e4: Vec<String> = e4.coeffs().iter().map(format_rational).collect();
    let th: Vec<String> = theta.iter().map(|x| x.to_string()).collect();
    let mut t = TextReport::new();
    t.section("theta-e8").entry("theta", th.join(",")).entry("e4", e4.join(",")).entry("verdict", pass(ok));
    let out = t.render();
    if !ok {
        return Err(Failure::new(Category::Mismatch, anyhow!("E_8 theta series differs from E_4")).with_output(out));
    }
    Ok(out)
}

fn eisenstein(w: u32) -> Outcome {
    let coords = restrict::eisenstein_coords(w).map_err(computation)?;
    let mut t = TextReport::new();
    t.section(format!("E_{w}"));
    for (i, c) in coords.iter().enumerate() {
        t.entry(format!("coord{i}"), format_rational(c));
    }
    Ok(t.render())
}
