//! Command implementations. Data goes to stdout, diagnostics to stderr;
//! verification commands encode their verdict in the exit code.

use crate::params::{parse_param, AnyModel, Param};
use crate::{
    CheckArgs, CheckSuite, Cli, Cmd, EnumArgs, RatesArgs, SampleArgs, SampleMethod, TablesArgs,
    TreeFormat,
};
use fragtree::checks::{check_consistency, check_normalization};
use fragtree::closed_forms::{norm_closed, psi_closed, rate_closed, weight_closed, SpecialBeta};
use fragtree::enumerate::{
    count_all, count_binary, find_collisions, for_each_binary_capped,
    for_each_fragmentation_capped, signature_table_capped, verify_w_expansion, BINARY_CAP,
    GENERAL_CAP,
};
use fragtree::format::{shape_to_dot, timed_to_json, timed_to_newick, to_dot, to_json, to_newick};
use fragtree::measures::{factorization_check, MeasureSpec};
use fragtree::rates::{check_complete_monotonicity, invert_rates, sample_timed, RateTable};
use fragtree::sample::{rng_from_seed, sample_branching, sample_growth};
use fragtree::{FragTree, GibbsModel, Rational, Scalar};
use std::collections::HashMap;

type CliResult = Result<i32, String>;

pub fn dispatch(cli: Cli) -> CliResult {
    match cli.cmd {
        Cmd::Tables(args) => tables(args),
        Cmd::Sample(args) => sample(args),
        Cmd::Check(args) => check(args),
        Cmd::Enumerate(args) => enumerate(args),
        Cmd::Rates(args) => rates(args),
    }
}

fn lib(e: fragtree::Error) -> String {
    e.to_string()
}

/// Coerce a parsed parameter into the scalar mode of the current model.
fn to_exact(p: Param, what: &str) -> Result<Rational, String> {
    match p {
        Param::Exact(r) => Ok(r),
        _ => Err(format!(
            "{what} must be a rational (p/q) when the model runs in exact mode"
        )),
    }
}

// ---------------------------------------------------------------- tables --

fn tables(args: TablesArgs) -> CliResult {
    let model = args.model.build()?;
    match &model {
        AnyModel::Exact(m) => {
            let lambda2 = to_exact(parse_param(&args.lambda2)?, "--lambda2")?;
            print_tables(m, lambda2, args.n_max)?;
            if args.verify {
                return verify_tables(m, args.n_max);
            }
            Ok(0)
        }
        AnyModel::Float(m) => {
            if args.verify {
                return Err("--verify needs exact mode (rational parameters)".into());
            }
            let lambda2 = parse_param(&args.lambda2)?.as_f64();
            print_tables(m, lambda2, args.n_max)?;
            Ok(0)
        }
    }
}

fn print_tables<S: Scalar>(model: &GibbsModel<S>, lambda2: S, n_max: u32) -> Result<(), String> {
    if !model.is_gibbs() {
        return Err("the comb model has no Gibbs tables; see `fragtree rates --comb`".into());
    }
    let n_max = n_max.max(2);
    let rates = RateTable::for_model(model, lambda2, n_max).map_err(lib)?;
    let binary_gibbs = model.is_binary();
    if binary_gibbs {
        println!("n\tw\tZ\tpsi\tlambda");
    } else {
        println!("n\tw\tc\tpsi\tlambda");
    }
    for n in 1..=n_max {
        let w = model.weight_w(n).map_err(lib)?;
        let norm = if n >= 2 {
            model.norm(n).map_err(lib)?.to_string()
        } else {
            "-".into()
        };
        let psi = if binary_gibbs {
            model.psi(n).map_err(lib)?.to_string()
        } else {
            "-".into()
        };
        let lambda = if n >= 2 {
            rates.lambda(n).to_string()
        } else {
            "0".into()
        };
        println!("{n}\t{w}\t{norm}\t{psi}\t{lambda}");
    }
    Ok(())
}

fn verify_tables(model: &GibbsModel<Rational>, n_max: u32) -> CliResult {
    let Some(sb) = SpecialBeta::of_model(model) else {
        return Err("--verify covers beta in {-3/2, -1, 0, inf} only".into());
    };
    let rates = RateTable::for_model(model, Rational::from_int(1), n_max.max(2)).map_err(lib)?;
    for n in 1..=n_max.max(2) {
        if model.weight_w(n).map_err(lib)? != weight_closed(sb, n) {
            eprintln!("verify: w({n}) differs from the closed form");
            return Ok(1);
        }
        if n >= 2 {
            if model.norm(n).map_err(lib)? != norm_closed(sb, n) {
                eprintln!("verify: Z({n}) differs from the closed form");
                return Ok(1);
            }
            if model.psi(n).map_err(lib)? != psi_closed(sb, n) {
                eprintln!("verify: psi({n}) differs from the closed form");
                return Ok(1);
            }
            if rates.lambda(n) != rate_closed(sb, n) {
                eprintln!("verify: lambda({n}) differs from the closed form");
                return Ok(1);
            }
        }
    }
    eprintln!("verify: pass (rows match the closed forms exactly)");
    Ok(0)
}

// ---------------------------------------------------------------- sample --

fn sample(args: SampleArgs) -> CliResult {
    let model = args.model.build()?;
    match &model {
        AnyModel::Exact(m) => sample_with(m, &args),
        AnyModel::Float(m) => sample_with(m, &args),
    }
}

fn sample_with<S: Scalar>(model: &GibbsModel<S>, args: &SampleArgs) -> CliResult {
    if args.timed && args.method == SampleMethod::Branching {
        return Err("--timed uses the growth sampler".into());
    }
    if args.timed && args.format == TreeFormat::Dot {
        return Err("--timed supports json and newick output".into());
    }
    let mut rng = rng_from_seed(args.seed);
    for i in 0..args.count {
        if args.timed {
            let tt = sample_timed(model, args.n, args.lambda2, &mut rng).map_err(lib)?;
            match args.format {
                TreeFormat::Json => println!("{}", timed_to_json(&tt)),
                TreeFormat::Newick => println!("{}", timed_to_newick(&tt)),
                TreeFormat::Dot => unreachable!(),
            }
            continue;
        }
        let tree = match args.method {
            SampleMethod::Growth => sample_growth(model, args.n, &mut rng).map_err(lib)?,
            SampleMethod::Branching => sample_branching(model, args.n, &mut rng).map_err(lib)?,
        };
        match args.format {
            TreeFormat::Json => println!("{}", to_json(&tree)),
            TreeFormat::Newick => println!("{}", to_newick(&tree)),
            TreeFormat::Dot => print!("{}", to_dot(&tree, &format!("t{i}"))),
        }
    }
    Ok(0)
}

// ----------------------------------------------------------------- check --

fn check(args: CheckArgs) -> CliResult {
    match args.suite {
        CheckSuite::Consistency | CheckSuite::Normalization => {
            let model = args.model.build()?;
            let AnyModel::Exact(m) = &model else {
                return Err("identity checks must run exactly; pass rational parameters".into());
            };
            let report = match args.suite {
                CheckSuite::Consistency => check_consistency(m, args.n_max).map_err(lib)?,
                _ => check_normalization(m, args.n_max).map_err(lib)?,
            };
            println!("{}", serde_json::to_string(&report).unwrap());
            Ok(if report.pass { 0 } else { 1 })
        }
        CheckSuite::WExpansion => {
            let model = args.model.build()?;
            let AnyModel::Exact(m) = &model else {
                return Err("the expansion check must run exactly".into());
            };
            let mut first_failure: Option<u32> = None;
            for n in 2..=args.n_max {
                if !verify_w_expansion(m, n).map_err(lib)? {
                    first_failure = Some(n);
                    break;
                }
            }
            let pass = first_failure.is_none();
            println!(
                "{}",
                serde_json::json!({
                    "suite": "w-expansion",
                    "model": m.describe(),
                    "n_max": args.n_max,
                    "pass": pass,
                    "first_failure_n": first_failure,
                })
            );
            Ok(if pass { 0 } else { 1 })
        }
        CheckSuite::SamplerAgreement => {
            let model = args.model.build()?;
            let fm = model.to_float()?;
            if !fm.is_binary() {
                return Err("sampler agreement compares the binary samplers".into());
            }
            let mut rng_b = rng_from_seed(args.seed);
            let mut rng_g = rng_from_seed(args.seed ^ 0x9e3779b97f4a7c15);
            let mut counts_b: HashMap<FragTree, u64> = HashMap::new();
            let mut counts_g: HashMap<FragTree, u64> = HashMap::new();
            for _ in 0..args.count {
                *counts_b
                    .entry(sample_branching(&fm, args.n, &mut rng_b).map_err(lib)?)
                    .or_insert(0) += 1;
                *counts_g
                    .entry(sample_growth(&fm, args.n, &mut rng_g).map_err(lib)?)
                    .or_insert(0) += 1;
            }
            let mut keys: Vec<&FragTree> = counts_b.keys().chain(counts_g.keys()).collect();
            keys.sort();
            keys.dedup();
            let total = args.count as f64;
            let tv: f64 = 0.5
                * keys
                    .iter()
                    .map(|t| {
                        let fb = counts_b.get(*t).copied().unwrap_or(0) as f64 / total;
                        let fg = counts_g.get(*t).copied().unwrap_or(0) as f64 / total;
                        (fb - fg).abs()
                    })
                    .sum::<f64>();
            let pass = tv < args.tv_threshold;
            println!(
                "{}",
                serde_json::json!({
                    "suite": "sampler-agreement",
                    "model": fm.describe(),
                    "n": args.n,
                    "samples_each": args.count,
                    "tv": tv,
                    "threshold": args.tv_threshold,
                    "pass": pass,
                })
            );
            Ok(if pass { 0 } else { 1 })
        }
        CheckSuite::Factorization => {
            let spec = if args.delta_half {
                MeasureSpec::PointMassHalf
            } else if let Some(atoms) = &args.atoms {
                MeasureSpec::Discrete(parse_atoms(atoms)?)
            } else if let Some(beta) = &args.model.beta {
                match parse_param(beta)? {
                    Param::Infinite => MeasureSpec::PointMassHalf,
                    p => MeasureSpec::Beta(p.as_f64()),
                }
            } else {
                return Err(
                    "factorization needs a measure: --beta B, --delta-half or --atoms".into(),
                );
            };
            let report = factorization_check(&spec, args.i_max, args.tol).map_err(lib)?;
            println!("{}", serde_json::to_string(&report).unwrap());
            Ok(if report.gibbs_pass { 0 } else { 1 })
        }
    }
}

fn parse_atoms(s: &str) -> Result<Vec<(f64, f64)>, String> {
    s.split(',')
        .map(|pair| {
            let (x, w) = pair
                .split_once(':')
                .ok_or_else(|| format!("atom {pair:?} is not x:w"))?;
            let x: f64 = x.trim().parse().map_err(|_| format!("bad atom x in {pair:?}"))?;
            let w: f64 = w.trim().parse().map_err(|_| format!("bad atom w in {pair:?}"))?;
            Ok((x, w))
        })
        .collect()
}

// ------------------------------------------------------------- enumerate --

fn enumerate(args: EnumArgs) -> CliResult {
    let binary_cap = args.cap.unwrap_or(BINARY_CAP);
    let general_cap = args.cap.unwrap_or(GENERAL_CAP);
    let explicit_n = || args.n.ok_or_else(|| "missing --n".to_string());
    let mut did_something = false;

    if let Some(coll_n) = args.collisions {
        let n = if coll_n != 0 { coll_n } else { explicit_n()? };
        let collisions = find_collisions(n).map_err(lib)?;
        println!("collisions at n = {n}: {}", collisions.len());
        for (sig, shapes) in &collisions {
            println!(
                "signature {sig}: {} shapes, Q = {}",
                shapes.len(),
                shapes.iter().map(|e| e.labelings).sum::<u64>()
            );
            for (i, entry) in shapes.iter().enumerate() {
                if args.dot {
                    print!("{}", shape_to_dot(&entry.shape, &format!("shape{i}")));
                } else {
                    println!("  shape {}: {} ({} labelings)", i, entry.shape, entry.labelings);
                }
            }
        }
        did_something = true;
    }
    if args.signatures {
        let table = signature_table_capped(explicit_n()?, binary_cap).map_err(lib)?;
        println!("signature\tshapes\tQ\tlabelings");
        for (sig, entries) in table.entries() {
            println!(
                "{sig}\t{}\t{}\t{}",
                entries.len(),
                table.q_sigma(sig),
                entries
                    .iter()
                    .map(|e| e.labelings.to_string())
                    .collect::<Vec<_>>()
                    .join(",")
            );
        }
        did_something = true;
    }
    if let Some(fmt) = args.list {
        let mut idx = 0u64;
        let mut emit = |t: &FragTree| {
            match fmt {
                TreeFormat::Json => println!("{}", to_json(t)),
                TreeFormat::Newick => println!("{}", to_newick(t)),
                TreeFormat::Dot => print!("{}", to_dot(t, &format!("t{idx}"))),
            }
            idx += 1;
        };
        if args.all {
            for_each_fragmentation_capped(explicit_n()?, general_cap, &mut emit).map_err(lib)?;
        } else {
            for_each_binary_capped(explicit_n()?, binary_cap, &mut emit).map_err(lib)?;
        }
        did_something = true;
    }
    if args.count || !did_something {
        let n = explicit_n()?;
        let cap = if args.all { general_cap } else { binary_cap };
        if n > cap {
            return Err(format!("size {n} exceeds enumeration cap {cap} (see --cap)"));
        }
        let c = if args.all {
            count_all(n).map_err(lib)?
        } else {
            count_binary(n).map_err(lib)?
        };
        println!("{c}");
    }
    Ok(0)
}

// ----------------------------------------------------------------- rates --

fn rates(args: RatesArgs) -> CliResult {
    if let Some(raw) = &args.from_lambda {
        let parsed: Vec<Param> = raw
            .iter()
            .map(|s| parse_param(s))
            .collect::<Result<_, _>>()?;
        if parsed.iter().any(|p| matches!(p, Param::Infinite)) {
            return Err("rates must be finite".into());
        }
        return if parsed.iter().any(Param::is_float) {
            let lambda: Vec<f64> = parsed.iter().map(Param::as_f64).collect();
            rates_from_sequence(&lambda, &args)
        } else {
            let lambda: Vec<Rational> = parsed
                .into_iter()
                .map(|p| match p {
                    Param::Exact(r) => r,
                    _ => unreachable!(),
                })
                .collect();
            rates_from_sequence(&lambda, &args)
        };
    }
    let model = args.model.build()?;
    match &model {
        AnyModel::Exact(m) => {
            let lambda2 = to_exact(parse_param(&args.lambda2)?, "--lambda2")?;
            let table = RateTable::for_model(m, lambda2, args.n_max).map_err(lib)?;
            print_rate_table(&table);
            rates_from_sequence_post(table.values(), &args)
        }
        AnyModel::Float(m) => {
            let lambda2 = parse_param(&args.lambda2)?.as_f64();
            let table = RateTable::for_model(m, lambda2, args.n_max).map_err(lib)?;
            print_rate_table(&table);
            rates_from_sequence_post(table.values(), &args)
        }
    }
}

fn print_rate_table<S: Scalar>(table: &RateTable<S>) {
    println!("n\tlambda");
    for n in 2..=table.max_n() {
        println!("{n}\t{}", table.lambda(n));
    }
}

fn rates_from_sequence<S: Scalar>(lambda: &[S], args: &RatesArgs) -> CliResult {
    println!("n\tlambda");
    for (i, l) in lambda.iter().enumerate() {
        println!("{}\t{l}", i + 2);
    }
    rates_from_sequence_post(lambda, args)
}

/// Shared tail: alternation report and/or inversion of a rate sequence.
fn rates_from_sequence_post<S: Scalar>(lambda: &[S], args: &RatesArgs) -> CliResult {
    if let Some(order) = args.cm_order {
        let report = check_complete_monotonicity(lambda, order);
        println!(
            "alternating-differences order {order}: {}",
            if report.pass {
                "pass".to_string()
            } else {
                format!("fail at {:?}", report.violation)
            }
        );
    }
    if args.invert {
        match invert_rates(lambda, args.tol) {
            Ok(inv) => {
                println!("n\tp(k, n-k) for k = 1..n-1");
                for n in 2..=inv.max_n() {
                    let row: Vec<String> = inv.row(n).iter().map(|p| p.to_string()).collect();
                    println!("{n}\t{}", row.join("\t"));
                }
            }
            Err(e) => {
                eprintln!("rejection: {e}");
                return Ok(1);
            }
        }
    }
    Ok(0)
}
