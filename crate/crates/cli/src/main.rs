//! fcx: decision procedures for free factors, finite pieces of the free
//! factor complex, spherical buildings, and exact integer homology.

mod cache;
mod output;

use std::io::Read;
use std::path::PathBuf;
use std::time::{Duration, Instant};

use clap::error::ErrorKind;
use clap::{Args, Parser, Subcommand};
use serde_json::{json, Value};

use fcx_core::buildings::{
    build_building, induced_apartment_map, steinberg_check,
};
use fcx_core::complexes::SimplicialComplex;
use fcx_core::factors::{
    apartment, build_truncation, enumeration_saturated, reference_spec, TruncationSpec,
};
use fcx_core::homology::reduced_homology;
use fcx_core::limits::Limits;
use fcx_core::stallings::CoreGraph;
use fcx_core::whitehead::{extends_to_basis, is_free_factor, is_primitive, is_z_simplex};
use fcx_core::words::Word;

use cache::Cache;

#[derive(Parser)]
#[command(
    name = "fcx",
    version,
    about = "Free factor complexes, spherical buildings, and exact homology at desk scale"
)]
struct Cli {
    #[command(flatten)]
    opts: GlobalOpts,
    #[command(subcommand)]
    cmd: Cmd,
}

#[derive(Args)]
struct GlobalOpts {
    /// Emit JSON instead of text.
    #[arg(long, global = true)]
    json: bool,
    /// Seed for randomized sampling (reserved; the shipped verbs are
    /// deterministic).
    #[arg(long, global = true)]
    seed: Option<u64>,
    /// Worker threads for enumeration and homology.
    #[arg(long, global = true)]
    threads: Option<usize>,
    /// Cache directory (default: $FCX_CACHE_DIR, then ~/.cache/fcx).
    #[arg(long, global = true)]
    cache_dir: Option<PathBuf>,
    /// Disable the on-disk cache.
    #[arg(long, global = true)]
    no_cache: bool,
    /// Cap on facets any single complex may have.
    #[arg(long, global = true)]
    max_facets: Option<usize>,
    /// Cap on states visited during enumeration.
    #[arg(long, global = true)]
    max_states: Option<usize>,
    /// Wall-clock budget in seconds.
    #[arg(long, global = true)]
    time_budget: Option<u64>,
    /// Lift the desk-scale guard on building sizes.
    #[arg(long, global = true)]
    allow_large: bool,
}

#[derive(Subcommand)]
enum Cmd {
    /// Decide whether a word is primitive (part of some basis).
    Primitive {
        #[arg(long)]
        rank: usize,
        word: String,
    },
    /// Decide whether the given words generate a free factor.
    FreeFactor {
        #[arg(long)]
        rank: usize,
        #[arg(required = true)]
        generators: Vec<String>,
        /// Print the witness automorphism on a positive answer.
        #[arg(long)]
        witness: bool,
    },
    /// Decide whether k words extend to a basis.
    BasisCheck {
        #[arg(long)]
        rank: usize,
        #[arg(required = true)]
        words: Vec<String>,
    },
    /// Decide whether corank-one factors form a standard simplex.
    ZSimplex {
        #[arg(long)]
        rank: usize,
        /// One factor per flag: whitespace-separated generator words.
        #[arg(long = "factor", required = true)]
        factors: Vec<String>,
    },
    /// Build the apartment spanned by a basis (rank = word count).
    Apartment {
        #[arg(required = true)]
        words: Vec<String>,
        #[arg(long)]
        homology: bool,
    },
    /// Build a finite truncation of the free factor poset.
    TruncateFc {
        rank: usize,
        /// Edge budget for core graphs (default: the pinned reference).
        #[arg(long)]
        max_edges: Option<usize>,
        /// Move-depth budget (default: the pinned reference).
        #[arg(long)]
        depth: Option<usize>,
        #[arg(long)]
        homology: bool,
        /// Also report whether one more round adds factors within budget.
        #[arg(long)]
        saturation: bool,
    },
    /// Build the spherical building of proper subspaces of F_q^n.
    Building {
        n: usize,
        q: u64,
        #[arg(long)]
        homology: bool,
        #[arg(long)]
        steinberg: bool,
    },
    /// Verify the abelianization map on the apartment of a basis.
    MapToBuilding {
        #[arg(required = true)]
        words: Vec<String>,
    },
    /// Reduced integer homology of a complex ("-" reads stdin).
    Homology { file: String },
    /// Link of a simplex in a complex ("-" reads stdin).
    Link {
        file: String,
        /// Comma-separated vertex indices of the simplex.
        #[arg(long)]
        simplex: String,
    },
    /// Compare the building's top homology rank with q^(n(n-1)/2).
    Steinberg { n: usize, q: u64 },
}

enum AppError {
    Usage(String),
    Run(fcx_core::Error),
    Io(std::io::Error),
}

impl From<fcx_core::Error> for AppError {
    fn from(e: fcx_core::Error) -> AppError {
        AppError::Run(e)
    }
}

impl From<std::io::Error> for AppError {
    fn from(e: std::io::Error) -> AppError {
        AppError::Io(e)
    }
}

fn main() {
    std::process::exit(run());
}

fn run() -> i32 {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let kind = e.kind();
            let _ = e.print();
            return if matches!(kind, ErrorKind::DisplayHelp | ErrorKind::DisplayVersion) {
                0
            } else {
                64
            };
        }
    };
    if let Some(threads) = cli.opts.threads {
        let _ = rayon::ThreadPoolBuilder::new()
            .num_threads(threads)
            .build_global();
    }
    match dispatch(&cli) {
        Ok(()) => 0,
        Err(AppError::Usage(msg)) => {
            eprintln!("usage error: {msg}");
            64
        }
        Err(AppError::Run(e @ fcx_core::Error::ResourceCap { .. })) => {
            eprintln!("aborted: {e}");
            3
        }
        Err(AppError::Run(e)) => {
            eprintln!("error: {e}");
            2
        }
        Err(AppError::Io(e)) => {
            eprintln!("error: {e}");
            2
        }
    }
}

fn limits_from(opts: &GlobalOpts) -> Limits {
    let mut limits = Limits::default();
    if let Some(f) = opts.max_facets {
        limits.max_facets = f;
    }
    if let Some(s) = opts.max_states {
        limits.max_states = s;
    }
    if let Some(secs) = opts.time_budget {
        limits.deadline = Some(Instant::now() + Duration::from_secs(secs));
    }
    limits.allow_large = opts.allow_large;
    limits
}

fn parse_word(rank: usize, text: &str) -> Result<Word, AppError> {
    Word::parse(rank, text).map_err(|e| AppError::Usage(e.to_string()))
}

fn parse_words(rank: usize, texts: &[String]) -> Result<Vec<Word>, AppError> {
    texts.iter().map(|t| parse_word(rank, t)).collect()
}

fn read_complex(file: &str) -> Result<SimplicialComplex, AppError> {
    let text = if file == "-" {
        let mut buf = String::new();
        std::io::stdin().read_to_string(&mut buf)?;
        buf
    } else {
        std::fs::read_to_string(file)?
    };
    let value: Value =
        serde_json::from_str(&text).map_err(|e| AppError::Run(fcx_core::Error::Json(e)))?;
    Ok(SimplicialComplex::from_json(&value)?)
}

fn print_bool(json_mode: bool, name: &str, value: bool, extra: Value) {
    if json_mode {
        let mut obj = json!({ "query": name, "result": value });
        if let (Some(map), Some(more)) = (obj.as_object_mut(), extra.as_object()) {
            for (k, v) in more {
                map.insert(k.clone(), v.clone());
            }
        }
        println!("{obj}");
    } else {
        println!("{value}");
    }
}

fn emit_complex(
    opts: &GlobalOpts,
    k: &SimplicialComplex,
    homology: bool,
    extra: Value,
) {
    if opts.json {
        let mut obj = json!({ "complex": k.to_json() });
        if homology {
            obj["homology"] = reduced_homology(k).to_json();
        }
        if let (Some(map), Some(more)) = (obj.as_object_mut(), extra.as_object()) {
            for (key, v) in more {
                map.insert(key.clone(), v.clone());
            }
        }
        println!("{obj}");
    } else {
        for line in output::complex_summary(k) {
            println!("{line}");
        }
        if let Some(more) = extra.as_object() {
            for (key, v) in more {
                match v {
                    Value::String(s) => println!("{key}: {s}"),
                    other => println!("{key}: {other}"),
                }
            }
        }
        if homology {
            for line in output::homology_lines(&reduced_homology(k)) {
                println!("{line}");
            }
        }
    }
}

fn dispatch(cli: &Cli) -> Result<(), AppError> {
    let opts = &cli.opts;
    let limits = limits_from(opts);
    let cache = Cache::new(opts.cache_dir.clone(), opts.no_cache);

    match &cli.cmd {
        Cmd::Primitive { rank, word } => {
            let w = parse_word(*rank, word)?;
            let result = is_primitive(&w)?;
            print_bool(opts.json, "primitive", result, json!({"word": w.to_string()}));
        }

        Cmd::FreeFactor {
            rank,
            generators,
            witness,
        } => {
            let words = parse_words(*rank, generators)?;
            let g = CoreGraph::build(*rank, &words)?;
            let check = is_free_factor(&g)?;
            let mut extra = json!({ "rank": g.subgroup_rank() });
            if *witness {
                if let Some(a) = &check.witness {
                    extra["witness"] = a.to_json();
                }
            }
            print_bool(opts.json, "free-factor", check.is_factor, extra);
            if !opts.json && *witness {
                if let Some(a) = &check.witness {
                    println!("witness: {}", a.to_json());
                }
            }
        }

        Cmd::BasisCheck { rank, words } => {
            let words = parse_words(*rank, words)?;
            let check = extends_to_basis(&words)?;
            if check.degenerate {
                eprintln!("note: more words than the ambient rank admits");
            }
            print_bool(
                opts.json,
                "basis-check",
                check.extends,
                json!({ "degenerate": check.degenerate, "built_rank": check.built_rank }),
            );
        }

        Cmd::ZSimplex { rank, factors } => {
            let mut graphs = Vec::new();
            for spec in factors {
                let texts: Vec<String> = spec.split_whitespace().map(String::from).collect();
                let words = parse_words(*rank, &texts)?;
                graphs.push(CoreGraph::build(*rank, &words)?);
            }
            let check = is_z_simplex(&graphs)?;
            if !check.is_simplex && !check.witnessed {
                eprintln!("note: negative answer is unverified by witness");
            }
            print_bool(
                opts.json,
                "z-simplex",
                check.is_simplex,
                json!({ "witnessed": check.witnessed }),
            );
        }

        Cmd::Apartment { words, homology } => {
            let rank = words.len();
            let basis = parse_words(rank, words)?;
            let k = apartment(&basis)?;
            emit_complex(opts, &k, *homology, json!({}));
        }

        Cmd::TruncateFc {
            rank,
            max_edges,
            depth,
            homology,
            saturation,
        } => {
            let spec = match (max_edges, depth) {
                (Some(m), Some(d)) => TruncationSpec::new(*rank, *m, *d)?,
                (None, None) => reference_spec(*rank).ok_or_else(|| {
                    AppError::Usage(format!(
                        "no pinned reference window for rank {rank}; pass --max-edges and --depth"
                    ))
                })?,
                _ => {
                    return Err(AppError::Usage(
                        "--max-edges and --depth must be given together".into(),
                    ))
                }
            };
            let spec_key = format!("truncate-fc|{}", spec.describe());
            let k = match cache.lookup(&spec_key, |v| SimplicialComplex::from_json(v).is_ok()) {
                Some(v) => SimplicialComplex::from_json(&v)?,
                None => {
                    let k = build_truncation(&spec, &limits)?;
                    cache.store(&spec_key, &k.to_json());
                    k
                }
            };
            let mut extra = json!({ "spec": spec.describe() });
            if *saturation {
                let sat = enumeration_saturated(&spec, &limits)?;
                extra["saturated"] = json!(sat);
            }
            emit_complex(opts, &k, *homology, extra);
        }

        Cmd::Building {
            n,
            q,
            homology,
            steinberg,
        } => {
            let spec_key = format!("building|n={n};q={q}");
            let k = match cache.lookup(&spec_key, |v| SimplicialComplex::from_json(v).is_ok()) {
                Some(v) => SimplicialComplex::from_json(&v)?,
                None => {
                    let k = build_building(*n, *q, &limits)?;
                    cache.store(&spec_key, &k.to_json());
                    k
                }
            };
            let mut extra = json!({});
            if *steinberg {
                let report = steinberg_check(*n, *q, &limits)?;
                if opts.json {
                    extra["steinberg"] = json!({
                        "computed": report.computed,
                        "expected": report.expected.to_string(),
                        "pass": report.pass,
                    });
                } else {
                    println!(
                        "steinberg: computed {} expected {} => {}",
                        report
                            .computed
                            .map_or("none".to_string(), |r| r.to_string()),
                        report.expected,
                        if report.pass { "pass" } else { "fail" }
                    );
                }
            }
            emit_complex(opts, &k, *homology, extra);
        }

        Cmd::MapToBuilding { words } => {
            let rank = words.len();
            let basis = parse_words(rank, words)?;
            let map = induced_apartment_map(&basis)?;
            let all_unit = map.cycle_image.iter().all(|&(_, c)| c == 1 || c == -1);
            if opts.json {
                println!(
                    "{}",
                    json!({
                        "verified": true,
                        "vertices": map.fc_apartment.vertex_count(),
                        "facets": map.fc_apartment.facet_count(),
                        "vertex_map": map.vertex_map,
                        "cycle_image": map.cycle_image,
                        "cycle_unit_coefficients": all_unit,
                    })
                );
            } else {
                println!("verified simplicial isomorphism onto a rational apartment");
                println!(
                    "vertices: {}, facets: {}",
                    map.fc_apartment.vertex_count(),
                    map.fc_apartment.facet_count()
                );
                println!(
                    "fundamental cycle image: nonzero with coefficient ±1 on all {} facets: {}",
                    map.cycle_image.len(),
                    all_unit
                );
            }
        }

        Cmd::Homology { file } => {
            let k = read_complex(file)?;
            let h = reduced_homology(&k);
            if opts.json {
                println!("{}", json!({ "homology": h.to_json() }));
            } else {
                for line in output::homology_lines(&h) {
                    println!("{line}");
                }
            }
        }

        Cmd::Link { file, simplex } => {
            let k = read_complex(file)?;
            let indices: Vec<usize> = simplex
                .split(',')
                .filter(|s| !s.trim().is_empty())
                .map(|s| {
                    s.trim()
                        .parse::<usize>()
                        .map_err(|_| AppError::Usage(format!("bad vertex index '{s}'")))
                })
                .collect::<Result<_, _>>()?;
            let link = k.link(&indices)?;
            emit_complex(opts, &link, false, json!({}));
        }

        Cmd::Steinberg { n, q } => {
            let report = steinberg_check(*n, *q, &limits)?;
            if opts.json {
                let mut obj = json!({
                    "n": n,
                    "q": q,
                    "computed": report.computed,
                    "expected": report.expected.to_string(),
                    "pass": report.pass,
                });
                if !report.pass {
                    obj["homology"] = report.homology.to_json();
                }
                println!("{obj}");
            } else {
                println!(
                    "computed {} expected {} => {}",
                    report
                        .computed
                        .map_or("none".to_string(), |r| r.to_string()),
                    report.expected,
                    if report.pass { "pass" } else { "fail" }
                );
                if !report.pass {
                    for line in output::homology_lines(&report.homology) {
                        println!("{line}");
                    }
                }
            }
        }
    }
    Ok(())
}
