//! The `linecluster` command-line tool. `run` is the whole program; the
//! binary only forwards `argv` and the exit code.

use std::ffi::OsString;
use std::fs::{self, File};
use std::io::{self, BufRead, BufWriter, Write};
use std::path::{Path, PathBuf};

use anyhow::{anyhow, bail, Context, Result};
use clap::Parser;
use serde_json::{json, Value};

use linecluster::hypergraph::{build_similarity_with, BuildOptions};
use linecluster::io::{read_dataset, read_labels, write_dataset, write_labels, PointTable};
use linecluster::lines::{angle_error, center_error, recover_lines};
use linecluster::mc;
use linecluster::model::{sample_glmm, CrossParams, Label};
use linecluster::oracle::{perr_exact, ErrorReport};
use linecluster::tls::{sigma_tls, sigma_tls_sq};
use linecluster::{autocluster, cluster_similarity, davis_kahan, mle_recover, report, Point};

pub mod args;
pub mod sweep;

use args::*;

/// Version of every CSV layout and JSON summary written by this tool.
pub const SCHEMA_VERSION: u32 = 1;

pub const THREADS_ENV: &str = "LINECLUSTER_THREADS";

/// Parses `args` (including the program name), runs the command, writes the
/// JSON summary to `stdout` and returns the process exit code.
pub fn run<I, T>(args: I, stdout: &mut dyn Write) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            let code = if e.use_stderr() { 2 } else { 0 };
            let _ = e.print();
            return code;
        }
    };
    configure_threads();
    match dispatch(cli.command).and_then(|summary| {
        serde_json::to_writer_pretty(&mut *stdout, &summary)?;
        writeln!(stdout)?;
        Ok(())
    }) {
        Ok(()) => 0,
        Err(e) => {
            eprintln!("error: {e:#}");
            1
        }
    }
}

fn configure_threads() {
    if let Some(n) = std::env::var(THREADS_ENV).ok().and_then(|v| v.parse::<usize>().ok()) {
        // a second call in the same process keeps the first pool
        let _ = rayon::ThreadPoolBuilder::new().num_threads(n.max(1)).build_global();
    }
}

fn dispatch(command: Command) -> Result<Value> {
    match command {
        Command::Gen(a) => gen(a),
        Command::TlsScore(a) => tls_score(a),
        Command::Cluster(a) => cluster(a),
        Command::Autocluster(a) => autocluster_cmd(a),
        Command::RecoverLines(a) => recover_lines_cmd(a),
        Command::Oracle(a) => oracle(a),
        Command::Bounds(a) => bounds(a),
        Command::Sweep(a) => sweep_cmd(a),
    }
}

/// Common summary fields; recovery metrics are `null` without ground truth.
fn summary(command: &str, n: Option<usize>, recovery: Option<linecluster::RecoveryReport>) -> serde_json::Map<String, Value> {
    let mut m = serde_json::Map::new();
    m.insert("schema_version".into(), json!(SCHEMA_VERSION));
    m.insert("command".into(), json!(command));
    m.insert("n".into(), json!(recovery.map(|r| r.n).or(n)));
    m.insert("ham_star".into(), json!(recovery.map(|r| r.ham_star)));
    m.insert("rate".into(), json!(recovery.map(|r| r.rate)));
    m.insert("exact".into(), json!(recovery.map(|r| r.exact)));
    m
}

fn create_out(dir: &Path) -> Result<()> {
    fs::create_dir_all(dir).with_context(|| format!("creating {}", dir.display()))
}

fn writer(path: &Path) -> Result<BufWriter<File>> {
    Ok(BufWriter::new(File::create(path).with_context(|| format!("creating {}", path.display()))?))
}

fn read_points(path: &Path) -> Result<PointTable> {
    let f = File::open(path).with_context(|| format!("opening {}", path.display()))?;
    read_dataset(io::BufReader::new(f)).with_context(|| format!("reading {}", path.display()))
}

fn read_params(path: &Path) -> Result<CrossParams> {
    let text = fs::read_to_string(path).with_context(|| format!("opening {}", path.display()))?;
    serde_json::from_str(&text).with_context(|| format!("parsing {}", path.display()))
}

fn write_labels_file(dir: &Path, labels: &[Label]) -> Result<PathBuf> {
    create_out(dir)?;
    let path = dir.join("labels.csv");
    write_labels(writer(&path)?, labels)?;
    Ok(path)
}

fn gen(a: GenArgs) -> Result<Value> {
    let params = match &a.params {
        Some(p) => read_params(p)?,
        None => CrossParams {
            alpha: a.model.alpha,
            half_length: a.model.half_length,
            sigma: a.model.sigma,
            n_points: a.model.n_points,
            seed: a.seed,
        },
    };
    let data = sample_glmm(&params.to_model()?)?;
    create_out(&a.out)?;
    let points = a.out.join("points.csv");
    write_dataset(writer(&points)?, &data.points, Some(&data.labels))?;
    let params_path = a.out.join("params.json");
    fs::write(&params_path, serde_json::to_string_pretty(&params)? + "\n")?;
    let mut s = summary("gen", Some(data.len()), None);
    s.insert("params".into(), json!(params));
    s.insert("points_csv".into(), json!(points));
    s.insert("params_json".into(), json!(params_path));
    Ok(s.into())
}

fn parse_point(s: &str) -> Result<Point> {
    let (x, y) = s.split_once(',').ok_or_else(|| anyhow!("expected `x,y`, got {s:?}"))?;
    Ok(Point::new(x.trim().parse()?, y.trim().parse()?))
}

fn tls_score(a: TlsScoreArgs) -> Result<Value> {
    let pts: Vec<Point> = if a.points.is_empty() {
        let mut text = String::new();
        for line in io::stdin().lock().lines() {
            text.push_str(&line?);
            text.push('\n');
        }
        read_dataset(text.as_bytes())?.points
    } else {
        a.points.iter().map(|s| parse_point(s)).collect::<Result<_>>()?
    };
    let triple: [Point; 3] = pts
        .try_into()
        .map_err(|v: Vec<Point>| anyhow!("need exactly 3 points, got {}", v.len()))?;
    let mut s = summary("tls-score", None, None);
    s.insert("sigma_tls_sq".into(), json!(sigma_tls_sq(&triple)));
    s.insert("sigma_tls".into(), json!(sigma_tls(&triple)));
    Ok(s.into())
}

fn cluster(a: ClusterArgs) -> Result<Value> {
    let table = read_points(&a.input)?;
    let (w, stats) = build_similarity_with(&table.points, a.t, table.labels.as_deref(), &BuildOptions::default())?;
    let fit = cluster_similarity(&w, a.seed)?;
    let recovery = table.labels.as_ref().map(|z| report(&fit.labels, z)).transpose()?;
    let mut s = summary("cluster", Some(table.points.len()), recovery);
    s.insert("t".into(), json!(a.t));
    s.insert("seed".into(), json!(a.seed));
    s.insert("eigenvalues".into(), json!(fit.embedding.eigenvalues));
    s.insert("residuals".into(), json!(fit.embedding.residuals));
    s.insert("kmeans_inertia".into(), json!(fit.kmeans_inertia));
    s.insert("degenerate".into(), json!(fit.degenerate));
    s.insert("accepted_triples".into(), json!(stats.accepted_triples));
    s.insert("total_triples".into(), json!(stats.total_triples));
    if let Some(z) = &table.labels {
        s.insert("p_hat".into(), json!(stats.p_hat()));
        s.insert("q_hat".into(), json!(stats.q_hat()));
        let dk = davis_kahan(&w, &fit.embedding, z, stats.p_hat(), stats.q_hat());
        s.insert("davis_kahan".into(), dk.map(|r| json!(r)).unwrap_or(Value::Null));
    }
    if let Some(dir) = &a.out {
        let path = write_labels_file(dir, &fit.labels)?;
        s.insert("labels_csv".into(), json!(path));
        if a.dump_w {
            let wpath = dir.join("w.csv");
            w.write_upper_csv(writer(&wpath)?)?;
            s.insert("w_csv".into(), json!(wpath));
        }
    }
    Ok(s.into())
}

fn autocluster_cmd(a: AutoclusterArgs) -> Result<Value> {
    let table = read_points(&a.input)?;
    let r = autocluster(&table.points, a.m, a.theta, a.seed)?;
    let recovery = table.labels.as_ref().map(|z| report(&r.labels, z)).transpose()?;
    let restricted = table
        .labels
        .as_ref()
        .map(|z| report(&r.restricted.labels, &r.restricted_labels(z)))
        .transpose()?;
    let mut s = summary("autocluster", Some(table.points.len()), recovery);
    s.insert("t_star".into(), json!(r.choice.t_star));
    s.insert("k".into(), json!(r.choice.k));
    s.insert("theta".into(), json!(r.choice.theta));
    s.insert("rule".into(), json!(r.choice.rule));
    s.insert("m".into(), json!(r.sample.m()));
    s.insert("touched".into(), json!(r.sample.touched.len()));
    s.insert("untouched".into(), json!(r.untouched.len()));
    s.insert("restricted".into(), json!(restricted));
    if let Some(dir) = &a.out {
        let path = write_labels_file(dir, &r.labels)?;
        s.insert("labels_csv".into(), json!(path));
    }
    Ok(s.into())
}

fn recover_lines_cmd(a: RecoverLinesArgs) -> Result<Value> {
    let table = read_points(&a.input)?;
    let labels = match &a.labels {
        Some(p) => read_labels(File::open(p).with_context(|| format!("opening {}", p.display()))?)?,
        None => table
            .labels
            .clone()
            .ok_or_else(|| anyhow!("dataset has no `z` column; pass --labels"))?,
    };
    let est = recover_lines(&table.points, &labels)?;
    let truth = a.params.as_deref().map(read_params).transpose()?.map(|p| p.to_model()).transpose()?;
    // match estimated clusters to true segments by the smaller total angle error
    let order = match &truth {
        Some(m) => {
            let id = angle_error(&est[0], m.segment(1)) + angle_error(&est[1], m.segment(2));
            let sw = angle_error(&est[1], m.segment(1)) + angle_error(&est[0], m.segment(2));
            if sw < id { [1, 0] } else { [0, 1] }
        }
        None => [0, 1],
    };
    let clusters: Vec<Value> = est
        .iter()
        .enumerate()
        .map(|(k, e)| {
            let mut c = json!({
                "label": k + 1,
                "center": [e.center.x, e.center.y],
                "direction": [e.direction.x, e.direction.y],
                "cluster_size": e.cluster_size,
                "top_eigenvalue": e.top_eigenvalue,
                "bottom_eigenvalue": e.bottom_eigenvalue,
                "rank_deficient": e.rank_deficient,
            });
            if let Some(m) = &truth {
                let seg = m.segment(if order[0] == k { 1 } else { 2 });
                c["sin_angle_error"] = json!(angle_error(e, seg));
                c["center_error"] = json!(center_error(e, seg.center()));
            }
            c
        })
        .collect();
    let recovery = table.labels.as_ref().map(|z| report(&labels, z)).transpose()?;
    let mut s = summary("recover-lines", Some(table.points.len()), recovery);
    s.insert("clusters".into(), json!(clusters));
    Ok(s.into())
}

fn error_report(params: &CrossParams, nodes: usize) -> Result<ErrorReport> {
    let ell = 2.0 * params.half_length;
    let alpha = params.alpha.min(std::f64::consts::PI - params.alpha);
    Ok(perr_exact(alpha, ell, params.sigma, nodes)?)
}

fn oracle(a: OracleArgs) -> Result<Value> {
    let params = read_params(&a.params)?;
    let model = params.to_model()?;
    let data = match &a.input {
        Some(p) => {
            let t = read_points(p)?;
            linecluster::LabeledDataset {
                labels: t.labels.unwrap_or_default(),
                points: t.points,
                params: model,
            }
        }
        None => sample_glmm(&model)?,
    };
    let pred = mle_recover(&data)?;
    let labeled = data.labels.len() == data.points.len();
    let recovery = if labeled { Some(report(&pred, &data.labels)?) } else { None };
    let mut s = summary("oracle", Some(data.points.len()), recovery);
    match error_report(&params, a.nodes) {
        Ok(e) => {
            s.insert("perr_exact".into(), json!(e.perr));
            s.insert("misclassification_exact".into(), json!(e.misclassification));
            s.insert("asymptote".into(), json!(e.asymptote));
        }
        // no closed form without noise
        Err(_) if params.sigma == 0.0 => {
            s.insert("perr_exact".into(), json!(0.0));
            s.insert("misclassification_exact".into(), json!(0.0));
        }
        Err(e) => return Err(e),
    }
    if labeled {
        let wrong = pred.iter().zip(&data.labels).filter(|(a, b)| a != b).count();
        s.insert("empirical_error".into(), json!(wrong as f64 / pred.len().max(1) as f64));
    }
    if let Some(dir) = &a.out {
        let path = write_labels_file(dir, &pred)?;
        s.insert("labels_csv".into(), json!(path));
    }
    Ok(s.into())
}

pub const BOUNDS_HEADER: [&str; 6] = ["bound_name", "params", "theory", "mc_estimate", "mc_se", "pass"];

pub fn write_bounds<W: Write>(out: W, checks: &[mc::BoundCheck]) -> Result<()> {
    use linecluster::io::fmt_f64;
    let mut w = csv::Writer::from_writer(out);
    w.write_record(BOUNDS_HEADER)?;
    for c in checks {
        w.write_record([
            c.bound_name.clone(),
            c.params.clone(),
            fmt_f64(c.theory),
            fmt_f64(c.mc_estimate),
            fmt_f64(c.mc_se),
            c.pass.to_string(),
        ])?;
    }
    w.flush()?;
    Ok(())
}

fn bounds(a: BoundsArgs) -> Result<Value> {
    if a.samples == 0 {
        bail!("--samples must be positive");
    }
    let checks = mc::standard_checks(a.samples, a.seed)?;
    let mut s = summary("bounds", None, None);
    s.insert("samples".into(), json!(a.samples));
    s.insert("checks".into(), json!(checks.len()));
    s.insert("failed".into(), json!(checks.iter().filter(|c| !c.pass).map(|c| format!("{} [{}]", c.bound_name, c.params)).collect::<Vec<_>>()));
    if let Some(dir) = &a.out {
        create_out(dir)?;
        let path = dir.join("bounds.csv");
        write_bounds(writer(&path)?, &checks)?;
        s.insert("bounds_csv".into(), json!(path));
    }
    Ok(s.into())
}

fn sweep_cmd(a: SweepArgs) -> Result<Value> {
    let text = fs::read_to_string(&a.config).with_context(|| format!("opening {}", a.config.display()))?;
    let config: sweep::SweepConfig = serde_json::from_str(&text).with_context(|| format!("parsing {}", a.config.display()))?;
    let rows = sweep::run_sweep(&config)?;
    let mut s = summary("sweep", None, None);
    s.insert("rows".into(), json!(rows.len()));
    s.insert("cells".into(), json!(sweep::summarize(&rows)));
    if let Some(dir) = &a.out {
        create_out(dir)?;
        let path = dir.join("sweep.csv");
        sweep::write_rows(writer(&path)?, &rows)?;
        s.insert("sweep_csv".into(), json!(path));
    }
    Ok(s.into())
}
