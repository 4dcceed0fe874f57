//! Command-line front end. [`run`] returns the process exit code: 0 on
//! success, 1 on a domain error, 2 on a usage error.

use std::fs;
use std::io::{BufReader, Write};
use std::path::{Path, PathBuf};
use std::sync::Arc;

use anyhow::{anyhow, bail, Context};
use clap::{Args, Parser, Subcommand};
use pathstate_core::evaluation::{run_benchmark, DEFAULT_BINS};
use pathstate_core::format::{parse_kb, ParseDiagnostic};
use pathstate_core::inference::coherency_report;
use pathstate_core::kb::{validate_kb, Priors};
use pathstate_core::service::{default_tol, handle_infer, InferRequest, Service};
use pathstate_core::simulate::{generate_dataset, mask_findings, read_cases, write_cases, CaseRecord, DatasetConfig};
use pathstate_core::{fixture, KnowledgeBase};

#[derive(Debug, Parser)]
#[command(name = "pathstate", version, about = "Causal Bayesian diagnosis over pathstate trees")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Args)]
struct KbArg {
    /// Knowledge base file; the bundled abdominal-pain fixture when omitted.
    #[arg(long)]
    kb: Option<PathBuf>,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Parse and validate a knowledge base and print its size.
    Validate { kb: PathBuf },
    /// Compare path-product likelihoods with directly elicited curves.
    Coherency {
        kb: PathBuf,
        #[arg(long)]
        disease: String,
        #[arg(long, default_value_t = default_tol())]
        tol: f64,
        #[arg(long, value_delimiter = ',', default_value = "0,24,72,132")]
        grid: Vec<f64>,
    },
    /// Posterior and treatment recommendation for one case file.
    Infer {
        #[command(flatten)]
        kb: KbArg,
        /// JSON inference request.
        #[arg(long)]
        case: PathBuf,
    },
    /// Sample labelled cases from the model as JSON lines.
    Simulate {
        #[command(flatten)]
        kb: KbArg,
        /// Cases per class.
        #[arg(long)]
        n: usize,
        /// Disease ids to sample; every disease when omitted.
        #[arg(long, value_delimiter = ',')]
        classes: Vec<String>,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        /// Fraction of findings to hide as unknown.
        #[arg(long, default_value_t = 0.0)]
        mask: f64,
        /// Output file; standard output when omitted.
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Calibration of the causal and independence models on a case set.
    Calibrate {
        #[command(flatten)]
        kb: KbArg,
        #[arg(long)]
        cases: PathBuf,
        #[arg(long)]
        target: String,
        /// Prior override: `id=p,...`, or bare values matched to the case
        /// classes in order of first appearance.
        #[arg(long)]
        priors: Option<String>,
        #[arg(long, default_value_t = DEFAULT_BINS)]
        bins: usize,
        /// Emit the full report as JSON instead of a table.
        #[arg(long)]
        json: bool,
    },
    /// Serve the JSON API.
    Serve {
        #[command(flatten)]
        kb: KbArg,
        #[arg(long, default_value_t = 8080)]
        port: u16,
        #[arg(long, default_value = "127.0.0.1")]
        host: String,
    },
}

fn located(path: &Path, diags: &[ParseDiagnostic]) -> String {
    diags.iter().map(|d| format!("{}:{d}", path.display())).collect::<Vec<_>>().join("\n")
}

fn load_kb(path: &Path) -> anyhow::Result<KnowledgeBase> {
    let text = fs::read_to_string(path).with_context(|| format!("cannot read {}", path.display()))?;
    parse_kb(&text).map(|p| p.kb).map_err(|d| anyhow!(located(path, &d)))
}

fn kb_or_fixture(arg: &KbArg) -> anyhow::Result<KnowledgeBase> {
    match &arg.kb {
        Some(p) => load_kb(p),
        None => Ok(fixture::knowledge_base()),
    }
}

/// `0.5,0.5` pairs with `classes` in order; `a=0.5,b=0.5` names diseases.
fn parse_priors(arg: &str, classes: &[String]) -> anyhow::Result<Priors> {
    let parts: Vec<&str> = arg.split(',').map(str::trim).filter(|s| !s.is_empty()).collect();
    if parts.is_empty() {
        bail!("--priors is empty");
    }
    let named = parts.iter().all(|p| p.contains('='));
    if !named && parts.iter().any(|p| p.contains('=')) {
        bail!("--priors mixes named and positional values");
    }
    let mut out = Priors::new();
    for (i, part) in parts.iter().enumerate() {
        let (id, value) = if named {
            let (id, v) = part.split_once('=').unwrap_or((part, ""));
            (id.trim().to_string(), v.trim())
        } else {
            let id = classes.get(i).ok_or_else(|| {
                anyhow!("--priors has {} values but the cases contain {} classes", parts.len(), classes.len())
            })?;
            (id.clone(), *part)
        };
        let p: f64 = value.parse().with_context(|| format!("bad prior `{value}` for `{id}`"))?;
        out.insert(id, p);
    }
    if !named && parts.len() != classes.len() {
        bail!("--priors has {} values but the cases contain {} classes", parts.len(), classes.len());
    }
    Ok(out)
}

fn classes_in_order(cases: &[CaseRecord]) -> Vec<String> {
    let mut out: Vec<String> = Vec::new();
    for c in cases {
        if !out.contains(&c.true_disease) {
            out.push(c.true_disease.clone());
        }
    }
    out
}

fn check_case_ids(kb: &KnowledgeBase, path: &Path, req: &InferRequest) -> anyhow::Result<()> {
    let second = req
        .second
        .iter()
        .flat_map(|s| s.findings.iter().enumerate().map(|(i, f)| (format!("second.findings[{i}]"), f)));
    let first = req.findings.iter().enumerate().map(|(i, f)| (format!("findings[{i}]"), f));
    for (at, f) in first.chain(second) {
        if kb.symptom(&f.symptom_id).is_none() {
            bail!("{}: {at}.symptom_id: unknown symptom `{}`", path.display(), f.symptom_id);
        }
    }
    Ok(())
}

fn execute(cmd: Command, out: &mut dyn Write, err: &mut dyn Write) -> anyhow::Result<()> {
    match cmd {
        Command::Validate { kb } => {
            let text = fs::read_to_string(&kb).with_context(|| format!("cannot read {}", kb.display()))?;
            let parsed = parse_kb(&text).map_err(|d| anyhow!(located(&kb, &d)))?;
            if !parsed.warnings.is_empty() {
                writeln!(err, "{}", located(&kb, &parsed.warnings))?;
            }
            let c = validate_kb(&parsed.kb).counts;
            writeln!(
                out,
                "{}: ok ({} diseases, {} pathstates, {} symptoms, {} nodes, {} warnings)",
                kb.display(),
                c.diseases,
                c.pathstates,
                c.symptoms,
                c.nodes,
                parsed.warnings.len()
            )?;
        }
        Command::Coherency { kb, disease, tol, grid } => {
            let kb = load_kb(&kb)?;
            let rows = coherency_report(&kb, &disease, &grid, tol)?;
            writeln!(out, "{:<24}{:>8}{:>10}{:>10}{:>10}", "symptom", "t (h)", "model", "direct", "delta")?;
            for r in &rows {
                writeln!(
                    out,
                    "{:<24}{:>8}{:>10.4}{:>10.4}{:>+10.4}",
                    r.symptom_id, r.t, r.model_p, r.direct_p, r.delta
                )?;
            }
            writeln!(out, "{} discrepancies above {tol}", rows.len())?;
        }
        Command::Infer { kb, case } => {
            let kb = kb_or_fixture(&kb)?;
            let text = fs::read_to_string(&case).with_context(|| format!("cannot read {}", case.display()))?;
            let req: InferRequest = serde_json::from_str(&text).map_err(|e| anyhow!("{}:{e}", case.display()))?;
            check_case_ids(&kb, &case, &req)?;
            let resp = handle_infer(&kb, &req)?;
            writeln!(out, "{}", serde_json::to_string_pretty(&resp)?)?;
        }
        Command::Simulate { kb, n, classes, seed, mask, out: path } => {
            let kb = kb_or_fixture(&kb)?;
            if !(0.0..=1.0).contains(&mask) {
                bail!("--mask {mask} must lie in [0, 1]");
            }
            let classes = if classes.is_empty() { kb.disease_ids().map(String::from).collect() } else { classes };
            let mut cases = generate_dataset(&kb, &DatasetConfig::new(classes, n, seed))?;
            if mask > 0.0 {
                mask_findings(&mut cases, mask, seed);
            }
            match path {
                Some(p) => {
                    let file = fs::File::create(&p).with_context(|| format!("cannot create {}", p.display()))?;
                    let mut w = std::io::BufWriter::new(file);
                    write_cases(&mut w, &cases)?;
                    w.flush()?;
                    writeln!(err, "wrote {} cases to {}", cases.len(), p.display())?;
                }
                None => write_cases(&mut *out, &cases)?,
            }
        }
        Command::Calibrate { kb, cases, target, priors, bins, json } => {
            let kb = kb_or_fixture(&kb)?;
            let file = fs::File::open(&cases).with_context(|| format!("cannot read {}", cases.display()))?;
            let records = read_cases(BufReader::new(file)).map_err(|e| anyhow!("{}: {e}", cases.display()))?;
            let priors = priors.map(|p| parse_priors(&p, &classes_in_order(&records))).transpose()?;
            let report = run_benchmark(&kb, &records, &target, priors.as_ref(), bins)?;
            if json {
                writeln!(out, "{}", serde_json::to_string_pretty(&report)?)?;
            } else {
                write!(out, "{}", report.to_text())?;
            }
        }
        Command::Serve { kb, port, host } => {
            let service = Arc::new(Service::new(kb_or_fixture(&kb)?));
            let runtime = tokio::runtime::Runtime::new()?;
            runtime.block_on(serve(service, &host, port, out))?;
        }
    }
    Ok(())
}

async fn serve(service: Arc<Service>, host: &str, port: u16, out: &mut dyn Write) -> anyhow::Result<()> {
    let listener = tokio::net::TcpListener::bind((host, port)).await?;
    writeln!(out, "listening on http://{}", listener.local_addr()?)?;
    out.flush()?;
    axum::serve(listener, server::router(service)).await?;
    Ok(())
}

mod server {
    use std::sync::Arc;

    use axum::body::Bytes;
    use axum::extract::State;
    use axum::http::{header, Method, StatusCode, Uri};
    use axum::response::IntoResponse;
    use axum::Router;
    use pathstate_core::service::Service;

    async fn dispatch(State(service): State<Arc<Service>>, method: Method, uri: Uri, body: Bytes) -> impl IntoResponse {
        let r = service.handle(method.as_str(), uri.path(), &body);
        let status = StatusCode::from_u16(r.status).unwrap_or(StatusCode::INTERNAL_SERVER_ERROR);
        (status, [(header::CONTENT_TYPE, "application/json")], r.body.to_string())
    }

    pub fn router(service: Arc<Service>) -> Router {
        Router::new().fallback(dispatch).with_state(service)
    }
}

/// Parse `args` (including the program name) and run the command.
pub fn run<I, T>(args: I, out: &mut dyn Write, err: &mut dyn Write) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<std::ffi::OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(c) => c,
        Err(e) => {
            let code = e.exit_code();
            let _ = if code == 0 { write!(out, "{}", e.render()) } else { write!(err, "{}", e.render()) };
            return code;
        }
    };
    match execute(cli.command, out, err) {
        Ok(()) => 0,
        Err(e) => {
            let _ = writeln!(err, "error: {e:#}");
            1
        }
    }
}
