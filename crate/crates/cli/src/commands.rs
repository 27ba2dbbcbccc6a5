use std::fmt::Write as _;
use std::path::Path;

use serde_json::{json, Value};

use sepspec::criteria::REPORT_TOL;
use sepspec::decompose::{block_gap, evaluate_f_bracket};
use sepspec::{
    abs_sep_condition, decompose_with, gurvits_barnum_ball, npt_witness_search,
    random_state_with_spectrum, seeded_rng, verify_decomposition, BipartiteDensityMatrix,
    CriterionReport, DecomposeOptions, SeededRng, Spectrum,
};

use crate::error::{CliError, NEGATIVE, SUCCESS};
use crate::format::{read_json, write_json, DecompositionFile, StateFile};
use crate::{
    CheckArgs, Cli, Command, ConditionFilter, DecomposeArgs, SampleArgs, ScanArgs, SpectrumSource,
    VerifyArgs, WitnessArgs,
};

/// Random spectra drawn per sample before `sample --condition-3` gives up.
pub const MAX_REJECTIONS: usize = 1_000_000;

const DEGENERACY_TOL: f64 = 1e-9;

/// Output of one command: a human-readable text, its JSON mirror, and the
/// exit code.
#[derive(Debug, Clone)]
pub struct Report {
    pub text: String,
    pub json: Value,
    pub code: u8,
}

pub fn run(cli: &Cli) -> Result<Report, CliError> {
    match &cli.command {
        Command::Check(args) => check(args),
        Command::Decompose(args) => decompose(args),
        Command::Verify(args) => verify(args),
        Command::Sample(args) => sample(args),
        Command::Scan(args) => scan(args),
        Command::Witness(args) => witness(args),
    }
}

fn dims_pair(dims: &[usize]) -> Result<(usize, usize), CliError> {
    match *dims {
        [m, n] if m > 0 && n > 0 => Ok((m, n)),
        _ => Err(CliError::invalid(
            "dimension invariant violated: --dims takes two positive integers",
        )),
    }
}

fn parse_spectrum(words: &[String], len: usize) -> Result<Spectrum, CliError> {
    if let [word] = words {
        if word == "uniform" {
            return Ok(Spectrum::uniform(len));
        }
    }
    if words.len() != len {
        return Err(CliError::invalid(format!(
            "dimension mismatch: {} eigenvalues given, dims need {len}",
            words.len()
        )));
    }
    let values = words
        .iter()
        .map(|w| {
            w.parse::<f64>()
                .map_err(|_| CliError::invalid(format!("not a number: {w:?}")))
        })
        .collect::<Result<Vec<_>, _>>()?;
    Ok(Spectrum::new(values)?)
}

/// Spectrum, dimensions and the state it stands for (the diagonal state
/// when only eigenvalues were given).
fn resolve(source: &SpectrumSource) -> Result<(Spectrum, BipartiteDensityMatrix), CliError> {
    match (&source.input, &source.lambdas) {
        (Some(path), _) => {
            let rho = read_json::<StateFile>(path)?.to_state()?;
            Ok((rho.spectrum(), rho))
        }
        (None, Some(words)) => {
            let (m, n) = dims_pair(source.dims.as_deref().unwrap_or_default())?;
            let spectrum = parse_spectrum(words, m * n)?;
            let rho = BipartiteDensityMatrix::new(spectrum.diagonal_matrix(), m, n)?;
            Ok((spectrum, rho))
        }
        (None, None) => Err(CliError::invalid(
            "give a state file or --lambdas with --dims",
        )),
    }
}

fn require_qubit(m: usize) -> Result<(), CliError> {
    if m == 2 {
        Ok(())
    } else {
        Err(CliError::invalid(format!(
            "dimension invariant violated: the first factor must be a qubit, got m = {m}"
        )))
    }
}

fn report_json(r: &CriterionReport) -> Value {
    json!({
        "condition": r.condition_name,
        "holds": r.holds,
        "lhs": r.lhs,
        "rhs": r.rhs,
        "margin": r.margin,
    })
}

fn check(args: &CheckArgs) -> Result<Report, CliError> {
    let (spectrum, rho) = resolve(&args.source)?;
    let (m, n) = rho.dims();
    require_qubit(m)?;
    let condition = abs_sep_condition(&spectrum, n)?;
    let ball = gurvits_barnum_ball(&spectrum);
    let pt_min = rho.min_pt_eigenvalue();
    let ppt = pt_min >= -REPORT_TOL;
    let verdict = if condition.holds {
        "separable from spectrum"
    } else {
        "not separable from spectrum"
    };

    let mut text = String::new();
    let values: Vec<String> = spectrum
        .values()
        .iter()
        .map(|v| format!("{v:.12}"))
        .collect();
    writeln!(text, "dims: 2x{n}").unwrap();
    writeln!(text, "spectrum: {}", values.join(" ")).unwrap();
    writeln!(
        text,
        "condition l1 <= l(2n-1) + 2 sqrt(l(2n-2) l(2n)): lhs {:.12e}, rhs {:.12e}, margin {:.6e}",
        condition.lhs, condition.rhs, condition.margin
    )
    .unwrap();
    writeln!(
        text,
        "ball tr(rho^2) <= 1/(mn-1): purity {:.12e}, bound {:.12e}, {}",
        ball.lhs,
        ball.rhs,
        if ball.holds { "inside" } else { "outside" }
    )
    .unwrap();
    writeln!(
        text,
        "PPT at identity: {} (min PT eigenvalue {pt_min:.6e})",
        if ppt { "yes" } else { "no" }
    )
    .unwrap();
    write!(text, "verdict: {verdict}").unwrap();

    Ok(Report {
        text,
        json: json!({
            "dims": [m, n],
            "spectrum": spectrum.values(),
            "condition": report_json(&condition),
            "ball": report_json(&ball),
            "ppt_at_identity": ppt,
            "min_pt_eigenvalue": pt_min,
            "verdict": verdict,
        }),
        code: if condition.holds { SUCCESS } else { NEGATIVE },
    })
}

fn decompose(args: &DecomposeArgs) -> Result<Report, CliError> {
    let rho = read_json::<StateFile>(&args.input)?.to_state()?;
    require_qubit(rho.dim_a())?;
    let opts = DecomposeOptions {
        max_reconstruction_error: args.tol,
        ..DecomposeOptions::default()
    };
    let (d, cert) = decompose_with(&rho, &opts)?;
    write_json(&args.out, &DecompositionFile::new(&d, &cert))?;
    Ok(Report {
        text: format!(
            "terms: {}\nt*: {:.15}\ninequality margin: {:.6e}\nreconstruction error: {:.3e}\nwritten: {}",
            d.terms.len(),
            cert.t_star,
            cert.inequality_margin,
            d.reconstruction_error,
            args.out.display()
        ),
        json: json!({
            "terms": d.terms.len(),
            "t_star": cert.t_star,
            "inequality_margin": cert.inequality_margin,
            "reconstruction_error": d.reconstruction_error,
            "out": args.out,
        }),
        code: SUCCESS,
    })
}

fn verify(args: &VerifyArgs) -> Result<Report, CliError> {
    let rho = read_json::<StateFile>(&args.state)?.to_state()?;
    require_qubit(rho.dim_a())?;
    let d = read_json::<DecompositionFile>(&args.decomposition)?.to_decomposition(rho.dim_b())?;
    let v = verify_decomposition(&rho, &d);
    let passed = v.passes(args.tol);
    Ok(Report {
        text: format!(
            "reconstruction distance: {:.6e}\nweight-sum deviation: {:.6e}\nmax unit-norm deviation: {:.6e}\nnegative weights: {}\nverdict: {} (tol {:e})",
            v.distance,
            v.weight_sum_deviation,
            v.max_unit_deviation,
            v.negative_weights,
            if passed { "verified" } else { "not verified" },
            args.tol
        ),
        json: json!({
            "distance": v.distance,
            "weight_sum_deviation": v.weight_sum_deviation,
            "max_unit_deviation": v.max_unit_deviation,
            "negative_weights": v.negative_weights,
            "tol": args.tol,
            "verified": passed,
        }),
        code: if passed { SUCCESS } else { NEGATIVE },
    })
}

fn random_spectrum(
    len: usize,
    n: usize,
    filter: Option<ConditionFilter>,
    rng: &mut SeededRng,
) -> Result<Spectrum, CliError> {
    let Some(filter) = filter else {
        return Ok(Spectrum::random_flat_dirichlet(len, rng));
    };
    let want = filter == ConditionFilter::Pass;
    for _ in 0..MAX_REJECTIONS {
        let s = Spectrum::random_flat_dirichlet(len, rng);
        if abs_sep_condition(&s, n)?.holds == want {
            return Ok(s);
        }
    }
    Err(CliError::failure(format!(
        "no spectrum matching the filter after {MAX_REJECTIONS} rejections"
    )))
}

fn sample(args: &SampleArgs) -> Result<Report, CliError> {
    let (m, n) = dims_pair(&args.dims)?;
    if args.condition.is_some() {
        require_qubit(m)?;
    }
    let fixed = match &args.spectrum {
        Some(words) => Some(parse_spectrum(words, m * n)?),
        None => None,
    };
    std::fs::create_dir_all(&args.out)
        .map_err(|e| CliError::invalid(format!("cannot create {}: {e}", args.out.display())))?;

    let mut rng = seeded_rng(args.seed);
    let mut files = Vec::with_capacity(args.count);
    for i in 0..args.count {
        let spectrum = match &fixed {
            Some(s) => s.clone(),
            None => random_spectrum(m * n, n, args.condition, &mut rng)?,
        };
        let values = spectrum.values();
        // every conjugate of a multiple of the identity is that multiple
        let rho = if values.first() == values.last() {
            BipartiteDensityMatrix::new(spectrum.diagonal_matrix(), m, n)?
        } else {
            random_state_with_spectrum(&spectrum, (m, n), &mut rng)?
        };
        let path = args.out.join(format!("state-{i:04}.json"));
        write_json(&path, &StateFile::from_state(&rho))?;
        files.push(path);
    }
    let listing: Vec<String> = files.iter().map(|p| p.display().to_string()).collect();
    Ok(Report {
        text: format!(
            "wrote {} states (seed {})\n{}",
            files.len(),
            args.seed,
            listing.join("\n")
        ),
        json: json!({ "seed": args.seed, "files": listing }),
        code: SUCCESS,
    })
}

fn scan(args: &ScanArgs) -> Result<Report, CliError> {
    let rho = read_json::<StateFile>(&args.input)?.to_state()?;
    require_qubit(rho.dim_a())?;
    if args.grid < 2 {
        return Err(CliError::invalid("--grid needs at least 2 points"));
    }
    let mut csv = String::from("t,h,f_selected,f_lo,f_hi,degenerate\n");
    let mut min_h = (f64::INFINITY, 0.0);
    for i in 0..args.grid {
        let t = i as f64 / (args.grid - 1) as f64;
        let h = block_gap(&rho, t)?;
        let f = evaluate_f_bracket(&rho, t, DEGENERACY_TOL)?;
        writeln!(
            csv,
            "{t},{h},{},{},{},{}",
            f.f_selected, f.f_lo, f.f_hi, f.degenerate
        )
        .unwrap();
        if h < min_h.0 {
            min_h = (h, t);
        }
    }
    write_to(&args.out, &csv)?;
    Ok(Report {
        text: format!(
            "rows: {}\nmin h: {:.6e} at t = {}\nwritten: {}",
            args.grid,
            min_h.0,
            min_h.1,
            args.out.display()
        ),
        json: json!({ "rows": args.grid, "min_h": min_h.0, "t_min_h": min_h.1, "out": args.out }),
        code: SUCCESS,
    })
}

fn write_to(path: &Path, text: &str) -> Result<(), CliError> {
    std::fs::write(path, text)
        .map_err(|e| CliError::invalid(format!("cannot write {}: {e}", path.display())))
}

fn witness(args: &WitnessArgs) -> Result<Report, CliError> {
    let (spectrum, rho) = resolve(&args.source)?;
    let (m, n) = rho.dims();
    let mut rng = seeded_rng(args.seed);
    let result = npt_witness_search(&spectrum, (m, n), args.budget, &mut rng)?;
    let diagonal = BipartiteDensityMatrix::new(spectrum.diagonal_matrix(), m, n)?;
    let recheck = match &result.unitary {
        Some(u) => Some(diagonal.conjugate_global(u)?.min_pt_eigenvalue()),
        None => None,
    };
    if result.found && !recheck.is_some_and(|v| v < 0.0) {
        return Err(CliError::failure("witness failed its independent recheck"));
    }
    if let (Some(u), Some(out)) = (&result.unitary, &args.out) {
        write_json(out, &StateFile::from_matrix(m, n, u))?;
    }

    let mut text = format!(
        "found: {}\nmin PT eigenvalue: {:.6e}\nevaluations: {}",
        if result.found { "yes" } else { "no" },
        result.min_pt_eigenvalue,
        result.iterations
    );
    if let Some(v) = recheck {
        write!(text, "\nrecheck: {v:.6e}").unwrap();
    }
    if let (true, Some(out)) = (result.found, &args.out) {
        write!(text, "\nwritten: {}", out.display()).unwrap();
    }
    Ok(Report {
        text,
        json: json!({
            "found": result.found,
            "min_pt_eigenvalue": result.min_pt_eigenvalue,
            "evaluations": result.iterations,
            "recheck": recheck,
            "out": args.out.as_ref().filter(|_| result.found),
        }),
        code: if result.found { SUCCESS } else { NEGATIVE },
    })
}
