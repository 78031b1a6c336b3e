//! The `farey-heights` command line.

use std::io::Write;
use std::path::{Path, PathBuf};
use std::process::ExitCode;
use std::time::{SystemTime, UNIX_EPOCH};

use clap::{Args, Parser, Subcommand};
use num_traits::Zero;

use farey_heights::exact::{factor, LogRat, Rat};
use farey_heights::harness::checks::run_suite;
use farey_heights::harness::report::{abc_csv, abc_json, summary_json, t2_json, write_outputs};
use farey_heights::harness::t2::saturation_report;
use farey_heights::harness::{
    abc_scan, parse_rat_list, ridout_scan, theorem2_construct, vojta_scan, vojta_scan_nested, ConfigFile, ScanConfig,
    ScanReport, T2Variant, TowerSpec, SCAN_KEYS,
};
use farey_heights::places::{
    height, height_rat, is_s_integer, is_s_unit, local_height_line, prime_to_s, radical, truncated_sum_outside,
    LineDivisor, Place, PlaceSet, ProjPoint, Target,
};
use farey_heights::stern_brocot::{alpha_interval, farey_interval, first_level, level_fractions, path_to, phi_direct};
use farey_heights::tower::{check_divisor_bookkeeping, local_contrib, per_prime_bound, SurfacePoint};
use farey_heights::{Error, Result};

#[derive(Parser, Debug)]
#[command(name = "farey-heights", version, about = "Exact heights, Farey intervals and blowup towers")]
struct Cli {
    /// `key = value` file; flags given on the command line take precedence.
    #[arg(long, global = true)]
    config: Option<PathBuf>,
    #[command(subcommand)]
    cmd: Cmd,
}

#[derive(Subcommand, Debug)]
enum Cmd {
    /// Fractions of one Stern-Brocot level, or the Farey data of a point.
    Farey {
        #[arg(long)]
        level: Option<u32>,
        /// Print the first level, path and (with --level) Farey interval of this rational.
        #[arg(long)]
        point: Option<String>,
    },
    /// Samples of phi_alpha over the closed interval I_alpha, as TSV.
    Phi {
        #[arg(long)]
        alpha: String,
        #[arg(long, default_value_t = 100)]
        samples: u32,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Heights and local heights of a rational or of a point [a : b : 1].
    Heights {
        /// `a` or `a,b`.
        #[arg(long)]
        point: String,
        #[arg(long = "S")]
        s: Option<String>,
    },
    /// The divisors of a tower, and per-prime data at a point.
    Tower {
        #[arg(long)]
        tower: Option<String>,
        /// Center of the tower (one value).
        #[arg(long)]
        centers: Option<String>,
        /// `a,b` for the point [a : b : 1].
        #[arg(long)]
        point: Option<String>,
    },
    /// Margins of the Vojta-type gcd inequality over a box.
    ScanVojta {
        #[command(flatten)]
        scan: ScanArgs,
        #[arg(long)]
        tower: Option<String>,
        #[arg(long)]
        centers: Option<String>,
        #[arg(long)]
        b_range: Option<String>,
        #[arg(long)]
        b_den: Option<String>,
        /// Box exponents `k1,k2,...`: fit over max(|a|,|b|) <= 2^k.
        #[arg(long)]
        nested: Option<String>,
    },
    /// Coprime abc triples ranked by quality.
    ScanAbc {
        #[arg(long)]
        c_max: Option<String>,
        #[arg(long)]
        top_k: Option<String>,
        #[arg(long)]
        out: Option<PathBuf>,
        #[arg(long)]
        no_timestamp: bool,
    },
    /// Ridout-type excess over a box of a.
    ScanRidout {
        #[command(flatten)]
        scan: ScanArgs,
    },
    /// Build b from the factorization of a - 1 and check the per-prime identities.
    ConstructT2 {
        /// One value or a comma separated list.
        #[arg(long)]
        a: String,
        #[arg(long)]
        n: usize,
        #[arg(long = "S")]
        s: Option<String>,
        #[arg(long)]
        eps: Option<String>,
        /// Accept non-S-integral a = A/B and factor A - B.
        #[arg(long)]
        rational: bool,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Run invariant suites.
    Check {
        #[arg(long, default_value = "all")]
        suite: String,
    },
}

#[derive(Args, Debug)]
struct ScanArgs {
    #[arg(long)]
    a_range: Option<String>,
    #[arg(long)]
    a_den: Option<String>,
    #[arg(long = "S")]
    s: Option<String>,
    #[arg(long)]
    eps: Option<String>,
    #[arg(long)]
    jobs: Option<String>,
    #[arg(long)]
    top_k: Option<String>,
    /// Directory for summary.json, points.jsonl and extremal.csv.
    #[arg(long)]
    out: Option<PathBuf>,
    #[arg(long)]
    no_timestamp: bool,
    /// Skip points.jsonl.
    #[arg(long)]
    no_points: bool,
}

/// Errors from bad input exit with 2, violations with 1.
enum Failure {
    Usage(String),
    Violation(String),
    Runtime(String),
}

impl From<Error> for Failure {
    fn from(e: Error) -> Failure {
        match e {
            Error::Parse(_) | Error::Config(_) | Error::ZeroDenominator | Error::Precondition(_) => {
                Failure::Usage(e.to_string())
            }
            _ => Failure::Runtime(e.to_string()),
        }
    }
}

type Run = std::result::Result<(), Failure>;

pub fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(c) => c,
        Err(e) => {
            let _ = e.print();
            return ExitCode::from(if e.use_stderr() { 2 } else { 0 });
        }
    };
    match run(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(Failure::Usage(m)) => {
            eprintln!("error: {m}");
            ExitCode::from(2)
        }
        Err(Failure::Violation(m)) => {
            eprintln!("violation: {m}");
            ExitCode::from(1)
        }
        Err(Failure::Runtime(m)) => {
            eprintln!("error: {m}");
            ExitCode::from(1)
        }
    }
}

fn run(cli: Cli) -> Run {
    let file = match &cli.config {
        Some(p) => ConfigFile::load(p)?,
        None => ConfigFile::default(),
    };
    match cli.cmd {
        Cmd::Farey { level, point } => farey(level, point),
        Cmd::Phi { alpha, samples, out } => phi(&alpha, samples, out.as_deref()),
        Cmd::Heights { point, s } => heights(&point, &pick(&file, &s, "S").unwrap_or_default()),
        Cmd::Tower { tower, centers, point } => tower_cmd(&file, tower, centers, point),
        Cmd::ScanVojta {
            scan,
            tower,
            centers,
            b_range,
            b_den,
            nested,
        } => {
            let mut file = file;
            reject_unknown(&file, &[SCAN_KEYS, &["out", "no-timestamp", "nested"]].concat())?;
            file.set("tower", tower.as_deref());
            file.set("centers", centers.as_deref());
            file.set("b-range", b_range.as_deref());
            file.set("b-den", b_den.as_deref());
            let cfg = scan_config(&mut file, &scan)?;
            let report = match pick(&file, &nested, "nested") {
                Some(ks) => {
                    let ks = ks
                        .split(',')
                        .map(|k| k.trim().parse::<u32>().map_err(|_| Error::Parse(format!("box exponent `{k}`"))))
                        .collect::<Result<Vec<_>>>()?;
                    vojta_scan_nested(&cfg, &ks)?
                }
                None => vojta_scan(&cfg)?,
            };
            emit_scan(&file, &scan, &report)?;
            if report.violations.is_empty() {
                Ok(())
            } else {
                Err(Failure::Violation(format!(
                    "{} per-prime bound violations",
                    report.violations.len()
                )))
            }
        }
        Cmd::ScanRidout { scan } => {
            let mut file = file;
            let known = ["a-range", "a-den", "S", "eps", "jobs", "top-k", "out", "no-timestamp", "no-points"];
            reject_unknown(&file, &known)?;
            let cfg = scan_config(&mut file, &scan)?;
            let report = ridout_scan(&cfg)?;
            emit_scan(&file, &scan, &report)
        }
        Cmd::ScanAbc {
            c_max,
            top_k,
            out,
            no_timestamp,
        } => {
            reject_unknown(&file, &["c-max", "top-k", "out", "no-timestamp"])?;
            let c_max: u64 = parse_num(&pick(&file, &c_max, "c-max").unwrap_or_else(|| "1000".into()), "c-max")?;
            let top_k: usize = parse_num(&pick(&file, &top_k, "top-k").unwrap_or_else(|| "10".into()), "top-k")?;
            let out = out.or_else(|| pick(&file, &None, "out").map(PathBuf::from));
            let ts = timestamp(switch(&file, no_timestamp, "no-timestamp")?);
            let r = abc_scan(c_max, top_k)?;
            let doc = pretty(&abc_json(&r, ts));
            match out {
                Some(dir) => {
                    std::fs::create_dir_all(&dir).map_err(Error::from)?;
                    std::fs::write(dir.join("summary.json"), doc).map_err(Error::from)?;
                    std::fs::write(dir.join("extremal.csv"), abc_csv(&r)).map_err(Error::from)?;
                }
                None => print!("{doc}"),
            }
            Ok(())
        }
        Cmd::ConstructT2 {
            a,
            n,
            s,
            eps,
            rational,
            out,
        } => {
            let s: PlaceSet = pick(&file, &s, "S").unwrap_or_default().parse()?;
            let eps: Rat = pick(&file, &eps, "eps").unwrap_or_else(|| "1/10".into()).parse()?;
            let variant = if rational { T2Variant::Rational } else { T2Variant::Integral };
            let cs = parse_rat_list(&a)?
                .iter()
                .map(|x| theorem2_construct(x, n, &s, variant))
                .collect::<Result<Vec<_>>>()?;
            let sat = saturation_report(&cs, &eps, &s)?;
            let docs: Vec<_> = cs.iter().zip(&sat).map(|(c, r)| t2_json(c, Some(r))).collect();
            let doc = pretty(&serde_json::json!({
                "kind": "construct-t2",
                "config": {"n": n.to_string(), "S": s.to_string(), "eps": eps.to_string(), "variant": format!("{variant:?}").to_lowercase()},
                "constructions": docs,
            }));
            match out {
                Some(p) => std::fs::write(p, doc).map_err(Error::from)?,
                None => print!("{doc}"),
            }
            let bad: Vec<String> = cs.iter().filter(|c| !c.identities_ok()).map(|c| c.a.to_string()).collect();
            if bad.is_empty() {
                Ok(())
            } else {
                Err(Failure::Violation(format!("per-prime identities fail for a = {}", bad.join(", "))))
            }
        }
        Cmd::Check { suite } => {
            let outcomes = run_suite(&suite)?;
            let mut failed = 0;
            for o in &outcomes {
                println!("{} {}: {}", if o.passed { "PASS" } else { "FAIL" }, o.name, o.detail);
                failed += usize::from(!o.passed);
            }
            if failed == 0 {
                Ok(())
            } else {
                Err(Failure::Violation(format!("{failed} suites failed")))
            }
        }
    }
}

fn reject_unknown(file: &ConfigFile, known: &[&str]) -> Run {
    file.check_known(known).map_err(|e| Failure::Usage(e.to_string()))
}

fn parse_num<T: std::str::FromStr>(s: &str, what: &str) -> Result<T> {
    s.trim().parse().map_err(|_| Error::Parse(format!("{what} `{s}`")))
}

/// Layers the scan flags over the config file.
fn scan_config(file: &mut ConfigFile, a: &ScanArgs) -> Result<ScanConfig> {
    file.set("a-range", a.a_range.as_deref());
    file.set("a-den", a.a_den.as_deref());
    file.set("S", a.s.as_deref());
    file.set("eps", a.eps.as_deref());
    file.set("jobs", a.jobs.as_deref());
    file.set("top-k", a.top_k.as_deref());
    if a.no_points {
        file.set("no-points", Some("true"));
    }
    ScanConfig::from_config(file)
}

/// The flag if given, else the config value.
fn pick(file: &ConfigFile, flag: &Option<String>, key: &str) -> Option<String> {
    flag.clone().or_else(|| file.get(key).map(str::to_string))
}

fn switch(file: &ConfigFile, flag: bool, key: &str) -> Result<bool> {
    Ok(flag || file.switch(key)?)
}

fn timestamp(disabled: bool) -> Option<u64> {
    if disabled {
        return None;
    }
    SystemTime::now().duration_since(UNIX_EPOCH).ok().map(|d| d.as_secs())
}

fn pretty(v: &serde_json::Value) -> String {
    serde_json::to_string_pretty(v).expect("json") + "\n"
}

fn emit_scan(file: &ConfigFile, a: &ScanArgs, r: &ScanReport) -> Run {
    let ts = timestamp(switch(file, a.no_timestamp, "no-timestamp")?);
    let out = a.out.clone().or_else(|| pick(file, &None, "out").map(PathBuf::from));
    match out {
        Some(dir) => write_outputs(r, &dir, ts)?,
        None => print!("{}", pretty(&summary_json(r, ts))),
    }
    Ok(())
}

fn farey(level: Option<u32>, point: Option<String>) -> Run {
    let mut out = std::io::stdout().lock();
    match (level, point) {
        (Some(n), None) => {
            for f in level_fractions(n)? {
                writeln!(out, "{}/{}", f.num(), f.den()).map_err(Error::from)?;
            }
        }
        (level, Some(p)) => {
            let x: Rat = p.parse()?;
            let first = first_level(&x)?;
            writeln!(out, "point\t{x}").map_err(Error::from)?;
            writeln!(out, "first_level\t{first}").map_err(Error::from)?;
            if (Rat::zero()..=Rat::one()).contains(&x) {
                writeln!(out, "path\t{}", path_to(&x)?).map_err(Error::from)?;
            }
            if let Some(n) = level {
                writeln!(out, "interval\t{}", farey_interval(&x, n as u64)?).map_err(Error::from)?;
            }
        }
        (None, None) => return Err(Failure::Usage("farey needs --level or --point".into())),
    }
    Ok(())
}

fn phi(alpha: &str, samples: u32, out: Option<&Path>) -> Run {
    let alpha: Rat = alpha.parse()?;
    if samples == 0 {
        return Err(Failure::Usage("samples must be positive".into()));
    }
    let iv = alpha_interval(&alpha)?;
    let (lo, hi) = (
        iv.lo().to_rat().expect("finite endpoint"),
        iv.hi().to_rat().expect("finite endpoint"),
    );
    let mut xs: Vec<Rat> = (0..=samples)
        .map(|k| &lo + &((&hi - &lo) * Rat::frac(k as i64, samples as i64)))
        .collect();
    if !xs.contains(&alpha) {
        xs.push(alpha.clone());
        xs.sort();
    }
    let mut text = String::from("x\tphi\tx_f64\tphi_f64\n");
    for x in xs {
        let y = phi_direct(&alpha, &x)?;
        text.push_str(&format!("{x}\t{y}\t{}\t{}\n", x.to_f64(), y.to_f64()));
    }
    match out {
        Some(p) => std::fs::write(p, text).map_err(Error::from)?,
        None => print!("{text}"),
    }
    Ok(())
}

fn heights(point: &str, s: &str) -> Run {
    let s: PlaceSet = s.parse()?;
    let vals = parse_rat_list(point)?;
    let show = |l: &LogRat| format!("{l}\t{}", l.to_f64());
    let mut lines = Vec::new();
    match vals.as_slice() {
        [a] => {
            lines.push(format!("point\t{a}"));
            lines.push(format!("S\t{s}"));
            lines.push(format!("h\t{}", show(&height_rat(a))));
            if !a.is_zero() {
                lines.push(format!("log_rad\t{}", show(&radical(a)?)));
                lines.push(format!("log_prime_to_S\t{}", show(&prime_to_s(a, &s)?)));
            }
            lines.push(format!("S_integer\t{}", is_s_integer(a, &s)));
            lines.push(format!("S_unit\t{}", is_s_unit(a, &s)));
            let cfg = Default::default();
            for (name, t) in [("0", Target::Zero), ("1", Target::One), ("inf", Target::Infinity)] {
                match truncated_sum_outside(a, t, &s, &cfg) {
                    Ok(v) => lines.push(format!("truncated_outside_S({name})\t{}", show(&v))),
                    Err(Error::PointOnDivisor) => lines.push(format!("truncated_outside_S({name})\ton divisor")),
                    Err(e) => return Err(e.into()),
                }
            }
        }
        [a, b] => {
            let p = ProjPoint::affine(a, b);
            lines.push(format!("point\t{p}"));
            lines.push(format!("h\t{}", show(&height(&p))));
            for (name, line, i) in [("X", LineDivisor::x(), 0), ("Y", LineDivisor::y(), 1), ("Z", LineDivisor::z(), 2)] {
                let c = &p.coords()[i];
                if c.is_zero() {
                    lines.push(format!("{name}=0\ton divisor"));
                    continue;
                }
                let mut places = vec![Place::Infinity];
                places.extend(factor(&Rat::from(c.clone()))?.primes().cloned().map(Place::Prime));
                let mut total = LogRat::zero();
                for v in places {
                    let l = local_height_line(&line, &p, &v)?;
                    total += &l;
                    lines.push(format!("{name}=0\t{v}\t{}", show(&l)));
                }
                lines.push(format!("{name}=0\tsum\t{}", show(&total)));
            }
        }
        _ => return Err(Failure::Usage("--point takes `a` or `a,b`".into())),
    }
    println!("{}", lines.join("\n"));
    Ok(())
}

fn tower_cmd(file: &ConfigFile, tower: Option<String>, centers: Option<String>, point: Option<String>) -> Run {
    let spec: TowerSpec = pick(file, &tower, "tower").unwrap_or_else(|| "chain:4".into()).parse()?;
    let centers = parse_rat_list(&pick(file, &centers, "centers").unwrap_or_else(|| "1".into()))?;
    let [center] = centers.as_slice() else {
        return Err(Failure::Usage("tower takes a single center".into()));
    };
    let t = spec.build(center.clone())?;
    let mut lines = vec![
        format!("tower\t{spec}"),
        format!("center\t{center}"),
        format!("choices\t{}", t.spec_string()),
        "i\tfraction\tcreating_interval\tpullback_mult\tdiscrepancy".to_string(),
    ];
    for n in t.nodes() {
        lines.push(format!(
            "{}\t{}/{}\t{}\t{}\t{}",
            n.index,
            n.fraction.num(),
            n.fraction.den(),
            n.creating_interval,
            n.mult_pullback,
            n.discrepancy
        ));
    }
    let crossing: Vec<String> = t.crossing_set().map(|c| c.to_string()).collect();
    lines.push(format!("crossing\t{}", crossing.join(" ")));
    let book = check_divisor_bookkeeping(&t);
    lines.push(format!("pullback\t{}", book.pullback_text));
    lines.push(format!("reduced\t{}", book.reduced));
    if let Some(pt) = point {
        let v = parse_rat_list(&pt)?;
        let [a, b] = v.as_slice() else {
            return Err(Failure::Usage("--point takes `a,b`".into()));
        };
        let sp = SurfacePoint::new(a.clone(), b.clone())?;
        let x = sp.offset(center)?;
        lines.push(format!("point\t{sp}"));
        let mut places = vec![Place::Infinity];
        places.extend(factor(&x)?.primes().cloned().map(Place::Prime));
        for v in &places {
            let contribs = t
                .nodes()
                .iter()
                .map(|n| local_contrib(&t, n, &sp, v).map(|l| l.to_string()))
                .collect::<Result<Vec<_>>>()?;
            lines.push(format!("local\t{v}\t{}", contribs.join("\t")));
            if let Place::Prime(q) = v {
                if farey_heights::exact::ordp(&x, q)? > 0 {
                    let r = per_prime_bound(&t, &sp, q)?;
                    lines.push(format!(
                        "bound\t{q}\tn_p={}\tm_p={}\tlhs={}\tbound={}\t{}",
                        r.n_p,
                        r.m_p,
                        r.lhs,
                        r.bound,
                        if r.ok { "ok" } else { "VIOLATED" }
                    ));
                }
            }
        }
    }
    println!("{}", lines.join("\n"));
    Ok(())
}
