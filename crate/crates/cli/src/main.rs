//! Command-line front end: parse algebra descriptions, run computations,
//! emit a human summary plus a machine-readable JSON section.
//!
//! Exit codes: 0 success, 1 mathematical negative result (closure fails,
//! axioms violated, no intersection), 2 malformed input.

use std::collections::BTreeMap;
use std::fmt::Write as _;
use std::process::ExitCode;

use clap::{Parser, Subcommand};

use carnot::catalog::{self, CATALOG_NAMES};
use carnot::descr::{AlgebraDescription, ProlongedDescription, SigmaFile};
use carnot::error::Error;
use carnot::lie::GradedLieAlgebra;
use carnot::linalg::{Mat, Subspace};
use carnot::matmodel::{ul_project_exact, CosetProjection};
use carnot::modification::{ClosureCheck, Modification};
use carnot::poly::MultiPoly;
use carnot::prolong::{
    aut_pg_algebra, largest_ideal_in, semidirect, tanaka_prolong, G0Spec, ProlongedAlgebra,
};
use carnot::scalar::Scalar;

#[derive(Parser)]
#[command(
    name = "carnot",
    version,
    about = "Stratified Lie algebra computations in exact arithmetic"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Parse a description and run the antisymmetry/Jacobi/grading checks.
    Check { file: String },
    /// Compute the strata-preserving derivation algebra.
    Derive { file: String },
    /// Tanaka prolongation (or semidirect product) through a chosen degree-zero part.
    Prolong {
        file: String,
        /// full | diagonal | grading | path to a JSON matrix list
        #[arg(long, default_value = "full")]
        g0: String,
        #[arg(long, default_value_t = 6)]
        max_degree: usize,
        /// Build g x g0 instead of prolonging.
        #[arg(long)]
        semidirect: bool,
    },
    /// Build the modification of a sigma file and print its bracket table.
    Modify {
        /// Optional base algebra file overriding the sigma file's base.
        base: Option<String>,
        #[arg(long)]
        sigma: String,
        /// Parameter bindings, e.g. a=0,b=1/2,c=1
        #[arg(long)]
        bind: Option<String>,
    },
    /// Print the polynomial closure equations of a sigma ansatz.
    ClosureEqs {
        base: Option<String>,
        #[arg(long)]
        sigma: String,
    },
    /// Integrate the development ODE and print the contact map.
    ContactMap {
        base: Option<String>,
        #[arg(long)]
        sigma: String,
        #[arg(long)]
        bind: Option<String>,
    },
    /// Classify a three-dimensional polarized algebra.
    Classify3 {
        file: String,
        /// Comma-separated labels spanning the polarization plane.
        #[arg(long, default_value = "f1,f2")]
        plane: String,
    },
    /// Write a bundled description to a file.
    Catalog {
        name: Option<String>,
        #[arg(short, long)]
        out: Option<String>,
        #[arg(long)]
        list: bool,
    },
    /// Derivations of a prolongation preserving the splitting.
    Autpg { file: String },
    /// Largest ideal of the prolongation inside its nonnegative part.
    IdealInQ { file: String },
    /// Factor a rational matrix through the unit-upper x lower cell.
    UlProject { file: String },
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(cli.command) {
        Ok(code) => code,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(exit_code_for(&e))
        }
    }
}

fn exit_code_for(e: &Error) -> u8 {
    match e {
        Error::Description(_)
        | Error::ParseScalar(_)
        | Error::ParsePoly { .. }
        | Error::UnknownVariable(_)
        | Error::UnknownCatalog(_)
        | Error::UnboundParameter(_)
        | Error::DimensionMismatch(_)
        | Error::AmbientMismatch(..) => 2,
        _ => 1,
    }
}

fn read_file(path: &str) -> Result<String, Error> {
    std::fs::read_to_string(path)
        .map_err(|e| Error::Description(format!("cannot read {path:?}: {e}")))
}

fn load_algebra(path: &str) -> Result<(AlgebraDescription, GradedLieAlgebra), Error> {
    let descr = AlgebraDescription::from_json(&read_file(path)?)?;
    let alg = descr.to_algebra()?;
    Ok((descr, alg))
}

fn verbose() -> bool {
    std::env::var("CARNOT_VERBOSE")
        .map(|v| v == "1")
        .unwrap_or(false)
}

/// Prints the human summary, a separator, and the machine section.
fn report(human: &str, machine: &serde_json::Value) {
    print!("{human}");
    println!("--- machine ---");
    println!("{}", serde_json::to_string_pretty(machine).expect("json"));
}

fn mat_rows(m: &Mat) -> Vec<Vec<String>> {
    (0..m.rows())
        .map(|i| (0..m.cols()).map(|j| m[(i, j)].to_string()).collect())
        .collect()
}

fn parse_bindings(spec: &Option<String>) -> Result<BTreeMap<String, Scalar>, Error> {
    let mut out = BTreeMap::new();
    if let Some(s) = spec {
        for part in s.split(',').filter(|p| !p.is_empty()) {
            let (name, value) = part
                .split_once('=')
                .ok_or_else(|| Error::Description(format!("bad binding {part:?}")))?;
            if value.contains('.') {
                return Err(Error::Description(format!(
                    "binding {name:?} must be a fraction, not a decimal"
                )));
            }
            out.insert(name.trim().to_string(), value.trim().parse()?);
        }
    }
    Ok(out)
}

/// Displays a bracket with the orientation that makes its leading
/// (highest-index) coefficient positive.
fn bracket_line(alg: &GradedLieAlgebra, i: usize, j: usize) -> Option<String> {
    let v = alg.bracket_basis(i, j);
    if v.is_empty() {
        return None;
    }
    let lead_negative = matches!(v.last().unwrap().1.sign(), Some(-1));
    let (l, r, terms) = if lead_negative {
        (j, i, v.iter().map(|(k, c)| (*k, -c)).collect::<Vec<_>>())
    } else {
        (i, j, v)
    };
    let mut rhs = String::new();
    for (pos, (k, c)) in terms.iter().rev().enumerate() {
        let neg = matches!(c.sign(), Some(-1));
        let mag = if neg { -c } else { c.clone() };
        if pos == 0 {
            if neg {
                rhs.push('-');
            }
        } else {
            rhs.push_str(if neg { " - " } else { " + " });
        }
        if !mag.is_one() {
            let _ = write!(rhs, "{mag} ");
        }
        let _ = write!(rhs, "{}", alg.labels()[*k]);
    }
    Some(format!(
        "[{}, {}] = {}",
        alg.labels()[l],
        alg.labels()[r],
        rhs
    ))
}

fn run(cmd: Command) -> Result<ExitCode, Error> {
    match cmd {
        Command::Check { file } => {
            let (_, alg) = load_algebra(&file)?;
            let violations = alg.check_axioms();
            let mut human = format!(
                "checked {} (dimension {}): {} violation(s)\n",
                file,
                alg.dim(),
                violations.len()
            );
            for v in &violations {
                let _ = writeln!(human, "  {v}");
            }
            let machine = serde_json::json!({
                "dimension": alg.dim(),
                "violations": violations.iter().map(|v| v.to_string()).collect::<Vec<_>>(),
            });
            report(&human, &machine);
            Ok(if violations.is_empty() {
                ExitCode::SUCCESS
            } else {
                ExitCode::from(1)
            })
        }
        Command::Derive { file } => {
            let (_, alg) = load_algebra(&file)?;
            let der = carnot::prolong::derivation_algebra(&alg)?;
            let mut human = format!("derivation algebra dimension: {}\n", der.dim());
            if verbose() {
                for (k, m) in der.basis().iter().enumerate() {
                    let _ = writeln!(human, "basis {k}:\n{m}");
                }
            }
            let machine = serde_json::json!({
                "dimension": der.dim(),
                "basis": der.basis().iter().map(mat_rows).collect::<Vec<_>>(),
            });
            report(&human, &machine);
            Ok(ExitCode::SUCCESS)
        }
        Command::Prolong {
            file,
            g0,
            max_degree,
            semidirect: semi,
        } => {
            let (_, alg) = load_algebra(&file)?;
            let g0spec = parse_g0(&g0)?;
            let space = g0spec.resolve(&alg)?;
            let p = if semi {
                semidirect(&alg, &space)?
            } else {
                tanaka_prolong(&alg, &space, max_degree)?
            };
            report_prolonged(&file, &p);
            Ok(ExitCode::SUCCESS)
        }
        Command::Modify { base, sigma, bind } => {
            let m = build_modification(&base, &sigma)?;
            let bindings = parse_bindings(&bind)?;
            match m.is_modification_subalgebra(&bindings)? {
                ClosureCheck::Closed => {}
                ClosureCheck::Fails {
                    left,
                    right,
                    residual,
                } => {
                    let human =
                        format!("graph does not close: first failing pair ({left}, {right})\n");
                    let machine = serde_json::json!({
                        "closed": false,
                        "witness": {
                            "left": left,
                            "right": right,
                            "residual": residual.iter().map(|c| c.to_string()).collect::<Vec<_>>(),
                        },
                    });
                    report(&human, &machine);
                    return Ok(ExitCode::from(1));
                }
            }
            let (s, polarization) = m.modified_brackets(&bindings)?;
            let mut human = String::from("modification closes; bracket table:\n");
            for i in 0..s.dim() {
                for j in i + 1..s.dim() {
                    if let Some(line) = bracket_line(&s, i, j) {
                        let _ = writeln!(human, "  {line}");
                    }
                }
            }
            let step = s.nilpotency_step();
            let _ = writeln!(
                human,
                "nilpotent: {}; solvable: {}; step: {}",
                s.is_nilpotent(),
                s.is_solvable(),
                step.map(|k| k.to_string()).unwrap_or_else(|| "-".into())
            );
            let machine = serde_json::json!({
                "closed": true,
                "algebra": serde_json::from_str::<serde_json::Value>(
                    &AlgebraDescription::from_algebra("modification", &s).to_json()
                ).expect("json"),
                "polarization": polarization.basis().iter()
                    .map(|v| v.iter().map(|c| c.to_string()).collect::<Vec<_>>())
                    .collect::<Vec<_>>(),
                "nilpotent": s.is_nilpotent(),
                "solvable": s.is_solvable(),
                "step": step,
            });
            report(&human, &machine);
            Ok(ExitCode::SUCCESS)
        }
        Command::ClosureEqs { base, sigma } => {
            let m = build_modification(&base, &sigma)?;
            let eqs = m.closure_equations()?;
            let mut human = format!("{} closure equation(s)\n", eqs.len());
            for e in &eqs {
                let _ = writeln!(human, "  {e} = 0");
            }
            let machine = serde_json::json!({
                "equations": eqs.iter().map(|e| e.to_string()).collect::<Vec<_>>(),
            });
            report(&human, &machine);
            Ok(ExitCode::SUCCESS)
        }
        Command::ContactMap { base, sigma, bind } => {
            let m = build_modification(&base, &sigma)?;
            let bindings = parse_bindings(&bind)?;
            run_contact_map(&m, &bindings)
        }
        Command::Classify3 { file, plane } => {
            let (_, alg) = load_algebra(&file)?;
            let labels: Vec<&str> = plane.split(',').collect();
            if labels.len() != 2 {
                return Err(Error::Description(
                    "plane must list exactly two labels".into(),
                ));
            }
            let vectors = labels
                .iter()
                .map(|l| {
                    let idx = alg.label_index(l)?;
                    Ok(carnot::lie::unit(alg.dim(), idx))
                })
                .collect::<Result<Vec<_>, Error>>()?;
            let polarization = Subspace::from_vectors(alg.dim(), vectors);
            let class = carnot::classify::classify_3d(&alg, &polarization)?;
            let mut human = format!("case: {}\n", class.label);
            if let Some(a) = &class.alpha {
                let _ = writeln!(human, "alpha: {a}");
            }
            let machine = serde_json::json!({
                "label": class.label.to_string(),
                "alpha": class.alpha.as_ref().map(|a| a.to_string()),
                "basis": mat_rows(&class.basis),
            });
            report(&human, &machine);
            Ok(ExitCode::SUCCESS)
        }
        Command::Catalog { name, out, list } => {
            if list || name.is_none() {
                for n in CATALOG_NAMES {
                    println!("{n}");
                }
                return Ok(ExitCode::SUCCESS);
            }
            let name = name.unwrap();
            let entry = catalog::entry(&name)?;
            let path = out.unwrap_or_else(|| format!("{name}.json"));
            std::fs::write(&path, entry.to_json() + "\n")
                .map_err(|e| Error::Description(format!("cannot write {path:?}: {e}")))?;
            println!("wrote {path}");
            Ok(ExitCode::SUCCESS)
        }
        Command::Autpg { file } => {
            let p = load_prolonged(&file)?;
            let aut = aut_pg_algebra(&p)?;
            let equals_ad_q = aut.matrix_span() == p.ad_q_span();
            let human = format!(
                "splitting-preserving derivations: dimension {}; equals ad(q): {}\n",
                aut.dim(),
                equals_ad_q
            );
            let machine = serde_json::json!({
                "dimension": aut.dim(),
                "equals_ad_q": equals_ad_q,
                "basis": aut.basis().iter().map(mat_rows).collect::<Vec<_>>(),
            });
            report(&human, &machine);
            Ok(ExitCode::SUCCESS)
        }
        Command::IdealInQ { file } => {
            let p = load_prolonged(&file)?;
            let ideal = largest_ideal_in(&p, &p.q_subspace())?;
            let human = format!("largest ideal inside q has dimension {}\n", ideal.dim());
            let machine = serde_json::json!({
                "dimension": ideal.dim(),
                "basis": ideal.basis().iter()
                    .map(|v| v.iter().map(|c| c.to_string()).collect::<Vec<_>>())
                    .collect::<Vec<_>>(),
            });
            report(&human, &machine);
            Ok(ExitCode::SUCCESS)
        }
        Command::UlProject { file } => {
            let rows: Vec<Vec<String>> = serde_json::from_str(&read_file(&file)?)
                .map_err(|e| Error::Description(e.to_string()))?;
            let n = rows.len();
            let mut m = Mat::zeros(n, n);
            for (i, row) in rows.iter().enumerate() {
                if row.len() != n {
                    return Err(Error::Description("matrix must be square".into()));
                }
                for (j, s) in row.iter().enumerate() {
                    m[(i, j)] = s.parse()?;
                }
            }
            match ul_project_exact(&m)? {
                CosetProjection::Factors { g, q } => {
                    let human = String::from("factors through the open cell\n");
                    let machine = serde_json::json!({
                        "intersects": true,
                        "g": mat_rows(&g),
                        "q": mat_rows(&q),
                    });
                    report(&human, &machine);
                    Ok(ExitCode::SUCCESS)
                }
                CosetProjection::NoIntersection => {
                    let machine = serde_json::json!({ "intersects": false });
                    report("coset misses the open cell\n", &machine);
                    Ok(ExitCode::from(1))
                }
            }
        }
    }
}

fn parse_g0(spec: &str) -> Result<G0Spec, Error> {
    match spec {
        "full" => Ok(G0Spec::Full),
        "diagonal" => Ok(G0Spec::Diagonal),
        "grading" => Ok(G0Spec::Grading),
        path => {
            let rows: Vec<Vec<Vec<String>>> = serde_json::from_str(&read_file(path)?)
                .map_err(|e| Error::Description(e.to_string()))?;
            let mats = rows
                .into_iter()
                .map(|m| {
                    let r = m.len();
                    let mut out = Mat::zeros(r, r);
                    for (i, row) in m.iter().enumerate() {
                        for (j, s) in row.iter().enumerate() {
                            out[(i, j)] = s.parse()?;
                        }
                    }
                    Ok(out)
                })
                .collect::<Result<Vec<_>, Error>>()?;
            Ok(G0Spec::Matrices(mats))
        }
    }
}

fn report_prolonged(file: &str, p: &ProlongedAlgebra) {
    let layers: Vec<usize> = p
        .layer_dims()
        .iter()
        .filter(|&&(d, dim)| !(d > 0 && dim == 0))
        .map(|&(_, d)| d)
        .collect();
    let status = if p.rigid() {
        let zero_at = p
            .layer_dims()
            .iter()
            .find(|&&(d, dim)| d > 0 && dim == 0)
            .map(|&(d, _)| d);
        match zero_at {
            Some(d) => format!("rigid at degree {d}"),
            None => "complete".into(),
        }
    } else {
        "nonzero at cap".into()
    };
    let human = format!(
        "prolonged {}: {}; layers {:?}; dim {}\n",
        file,
        status,
        layers,
        p.dim()
    );
    let descr = ProlongedDescription {
        algebra: AlgebraDescription::from_algebra("prolongation", p.algebra()),
        splitting: p
            .q_indices()
            .map(|i| p.algebra().labels()[i].clone())
            .collect(),
    };
    let machine = serde_json::json!({
        "rigid": p.rigid(),
        "layers": p.layer_dims(),
        "dim": p.dim(),
        "prolonged": serde_json::from_str::<serde_json::Value>(
            &serde_json::to_string(&descr).expect("json")
        ).expect("json"),
    });
    report(&human, &machine);
}

fn build_modification(base: &Option<String>, sigma_path: &str) -> Result<Modification, Error> {
    let file = SigmaFile::from_json(&read_file(sigma_path)?)?;
    let p = match base {
        Some(path) => {
            let (_, alg) = load_algebra(path)?;
            prolong_base(alg)?
        }
        None => catalog::resolve_base(&file.base)?,
    };
    Modification::from_file(&file, p)
}

fn prolong_base(alg: GradedLieAlgebra) -> Result<ProlongedAlgebra, Error> {
    let degrees = alg.degrees().ok_or(Error::MissingDegrees)?;
    if degrees.iter().any(|&d| d >= 0) {
        ProlongedAlgebra::from_graded(alg)
    } else {
        let g0 = G0Spec::Full.resolve(&alg)?;
        let p = tanaka_prolong(&alg, &g0, 6)?;
        if !p.rigid() {
            return Err(Error::Unsupported(
                "base algebra is not rigid within the degree cap".into(),
            ));
        }
        Ok(p)
    }
}

fn load_prolonged(path: &str) -> Result<ProlongedAlgebra, Error> {
    let text = read_file(path)?;
    // Accept either a prolonged description (algebra + splitting) or a plain
    // graded description with nonnegative degrees.
    if let Ok(pd) = serde_json::from_str::<ProlongedDescription>(&text) {
        let alg = pd.algebra.to_algebra()?;
        let p = ProlongedAlgebra::from_graded(alg)?;
        let q_labels: Vec<String> = p
            .q_indices()
            .map(|i| p.algebra().labels()[i].clone())
            .collect();
        if q_labels != pd.splitting {
            return Err(Error::Description(
                "splitting annotation does not match the degrees".into(),
            ));
        }
        return Ok(p);
    }
    let descr = AlgebraDescription::from_json(&text)?;
    let alg = descr.to_algebra()?;
    prolong_base(alg)
}

fn run_contact_map(
    m: &Modification,
    bindings: &BTreeMap<String, Scalar>,
) -> Result<ExitCode, Error> {
    let sigma = m.specialize(bindings)?;
    let p = m.prolongation();
    let alg = p.algebra();
    let g = p.base();
    let n = g.dim();
    let degrees = alg.degrees().ok_or(Error::MissingDegrees)?;
    // The development mechanism needs sigma valued in the degree-zero layer.
    for r in 0..p.q_dim() {
        if degrees[p.g_dim() + r] != 0 {
            for c in 0..n {
                if !sigma[(r, c)].is_zero() {
                    return Err(Error::Unsupported(
                        "contact-map requires sigma valued in the degree-zero layer".into(),
                    ));
                }
            }
        }
    }
    // Action of each sigma(e_c) on g, read off the prolongation brackets.
    let ring = carnot::contact::development_ring(n);
    let mut action: Vec<Vec<MultiPoly>> = vec![vec![MultiPoly::zero(&ring); n]; n];
    for c in 0..n {
        let x_c = MultiPoly::var(&ring, &format!("x{}", c + 1))?;
        let t = MultiPoly::var(&ring, "t")?;
        let scale = &x_c * &t;
        for r in 0..p.q_dim() {
            let coeff = &sigma[(r, c)];
            if coeff.is_zero() {
                continue;
            }
            let q_idx = p.g_dim() + r;
            for j in 0..n {
                for (k, v) in alg.bracket_basis(q_idx, j) {
                    if k < n {
                        action[k][j] = &action[k][j] + &scale.scale(&(coeff * &v));
                    }
                }
            }
        }
    }
    let v = carnot::contact::twisted_velocity(&g, &ring, &action)?;
    let gamma = carnot::contact::integrate_development(&g, &ring, &action)?;
    let map = carnot::contact::psi(&g, &ring, &action)?;
    let unit_jacobian = carnot::contact::psi_jacobian_is_unit(&g, &map)?;
    let mut human = String::from("development solution:\n");
    for (i, gi) in gamma.iter().enumerate() {
        let _ = writeln!(human, "  gamma{}(t) = {}", i + 1, gi);
    }
    let _ = writeln!(human, "contact map (t = 1):");
    for (i, pi) in map.iter().enumerate() {
        let _ = writeln!(human, "  psi{} = {}", i + 1, pi);
    }
    let _ = writeln!(human, "unit jacobian: {unit_jacobian}");
    let machine = serde_json::json!({
        "velocity": v.iter().map(|p| p.to_string()).collect::<Vec<_>>(),
        "gamma": gamma.iter().map(|p| p.to_string()).collect::<Vec<_>>(),
        "psi": map.iter().map(|p| p.to_string()).collect::<Vec<_>>(),
        "unit_jacobian": unit_jacobian,
    });
    report(&human, &machine);
    Ok(ExitCode::SUCCESS)
}
