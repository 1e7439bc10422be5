use std::fs;
use std::path::Path;
use std::time::Duration;

use anyhow::{anyhow, bail, Context, Result};
use num_rational::BigRational;
use num_traits::Zero;
use schutte_client::{Client, ClientError};
use schutte_core::bounds::{
    bounds_table, closed_form_upper, coarse_upper, erdos_lower, erdos_upper, split_dp_upper, szekeres_lower,
    BoundsError,
};
use schutte_core::constructions::{combine, rotational_set, FillPolicy};
use schutte_core::dice::{advise, min_dominator_probability, realized_set, simulate, win_odds, DiceError, DiceSet};
use schutte_core::dice_search::{search_multiroll, DiceSearchOutcome, SearchSpace};
use schutte_core::fixtures;
use schutte_core::io::{
    export_dot, parse_dice_set, parse_tournament_set, render_table_csv, render_table_text, write_dice_set,
    write_tournament_set, TournamentSetFile,
};
use schutte_core::sat::{
    encode, f_exact, parse_solver_output, search_set, to_dimacs, verify_external, Budget, ExternalVerdict, FOutcome,
    SearchStatus, StepStatus, SymmetryOptions,
};
use schutte_core::tournament::{is_sk, paley, undominated_witness, Tournament};
use schutte_core::wire::{
    AdviseRequest, AdviseResponse, Matrix, Odds, Rational, SimulateRequest, SimulateResponse, TournamentsResponse,
};
use schutte_core::TournamentSet;
use schutte_server::AppState;
use serde_json::{json, Value};

use crate::args::{Cli, Command, DiceSearch, DiceSource, Fill, Instance, Output, SatFind, TableFormat};

/// How a successful run ended; maps onto the exit status.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Status {
    Yes,
    No,
    Unknown,
}

impl Status {
    pub fn code(self) -> u8 {
        match self {
            Status::Yes => 0,
            Status::No => 1,
            Status::Unknown => 3,
        }
    }

    fn from_bool(b: bool) -> Self {
        if b {
            Status::Yes
        } else {
            Status::No
        }
    }
}

struct Printer {
    json: bool,
}

impl Printer {
    /// Prints `value` in JSON mode and `human` otherwise.
    fn emit(&self, value: Value, human: impl FnOnce() -> String) {
        if self.json {
            println!("{value}");
        } else {
            print!("{}", human());
        }
    }
}

pub fn run(cli: Cli) -> Result<Status> {
    let p = Printer { json: cli.json };
    match cli.command {
        Command::CheckSk(a) => {
            let set = read_set(&a.file)?;
            let holds = is_sk(&set, a.k);
            p.emit(json!({"k": a.k, "n": set.order(), "m": set.len(), "sk": holds}), || {
                format!("S_{}: {holds}\n", a.k)
            });
            Ok(Status::from_bool(holds))
        }
        Command::Witness(a) => {
            let set = read_set(&a.file)?;
            let w = undominated_witness(&set, a.k);
            let members = w.as_ref().map(|s| s.members());
            p.emit(json!({"k": a.k, "witness": members}), || match &w {
                Some(s) => format!("undominated: {s}\n"),
                None => format!("no undominated {}-subset; S_{} holds\n", a.k, a.k),
            });
            Ok(Status::from_bool(w.is_none()))
        }
        Command::Dot { file } => {
            print!("{}", export_dot(&read_set(&file)?));
            Ok(Status::Yes)
        }
        Command::Paley { p: q, out } => {
            let t = paley(q)?;
            write_set(&p, &out, &TournamentSet::single(t))
        }
        Command::Combine { first, second, fill, out } => {
            let (a, b) = (read_set(&first)?, read_set(&second)?);
            write_set(&p, &out, &combine(&a, &b, fill_policy(&fill)))
        }
        Command::Rotational { k, fill, out } => write_set(&p, &out, &rotational_set(k, fill_policy(&fill))),
        Command::Bound { k, m } => bound(&p, k, m),
        Command::Table { m_max, k_max, format } => {
            if m_max == 0 {
                bail!("--m-max must be at least 1");
            }
            let table = bounds_table(m_max, k_max);
            let format = if p.json { TableFormat::Json } else { format };
            match format {
                TableFormat::Text => print!("{}", render_table_text(&table)),
                TableFormat::Csv => print!("{}", render_table_csv(&table)),
                TableFormat::Json => {
                    let mut v = serde_json::to_value(&table)?;
                    v["populated"] = json!(table.populated().count());
                    println!("{v}");
                }
            }
            Ok(Status::Yes)
        }
        Command::SatFind(a) => sat_find(&p, a),
        Command::ExportCnf { instance, n } => {
            let (formula, _) = encode(instance.m, instance.k, n, symmetry(&instance))?;
            print!("{}", to_dimacs(&formula));
            Ok(Status::Yes)
        }
        Command::DiceVerify { dice, m, k } => dice_verify(&p, &dice, m, k),
        Command::DiceTournaments { dice, m, remote, out } => {
            let resp = match remote.remote {
                Some(url) => {
                    let name = remote_name(&dice)?;
                    match block_on(Client::new(url).tournaments(&name, m))? {
                        Ok(r) => r,
                        Err(e) => return client_failure(&p, e),
                    }
                }
                None => match TournamentsResponse::compute(&load_dice(&dice)?, m) {
                    Ok(r) => r,
                    Err(e) if is_tie_or_margin(&e) => {
                        eprintln!("{e}");
                        return Ok(Status::No);
                    }
                    Err(e) => return Err(e.into()),
                },
            };
            let set = response_set(&resp)?;
            if let Some(path) = &out.out {
                fs::write(path, write_tournament_set(&set)).with_context(|| format!("writing {}", path.display()))?;
            }
            p.emit(serde_json::to_value(&resp)?, || {
                let mut s = String::new();
                for t in &resp.tournaments {
                    let edges: Vec<String> =
                        t.edges.iter().map(|[i, j]| format!("{}>{}", resp.labels[*i], resp.labels[*j])).collect();
                    s += &format!("r={}: {}\n", t.rolls, edges.join(" "));
                }
                s += &format!("min edge probability: {}\n", show(&resp.min_edge_probability));
                s
            });
            Ok(Status::Yes)
        }
        Command::Advise { dice, opponents, m, remote } => {
            let resp = match remote.remote {
                Some(url) => {
                    let req = AdviseRequest { set: remote_name(&dice)?, opponents: opponents.clone(), m };
                    match block_on(Client::new(url).advise(&req))? {
                        Ok(r) => r,
                        Err(e) => return client_failure(&p, e),
                    }
                }
                None => {
                    let ds = load_dice(&dice)?;
                    let labels: Vec<&str> = opponents.iter().map(String::as_str).collect();
                    match advise(&ds, &labels, m) {
                        Ok(a) => AdviseResponse::new(&a, &opponents),
                        Err(DiceError::NoDominatingChoice(matrix)) => {
                            return no_choice(&p, &Matrix::from(&*matrix));
                        }
                        Err(e) => return Err(e.into()),
                    }
                }
            };
            p.emit(serde_json::to_value(&resp)?, || {
                let mut s = format!("play {} with {} roll(s)\n", resp.die, resp.rolls);
                for o in &resp.odds {
                    s += &format!("  vs {}: {}\n", o.opponent, show_odds(&o.odds));
                }
                s
            });
            Ok(Status::Yes)
        }
        Command::Simulate { dice, a, b, r, trials, seed, remote } => {
            let resp = match remote.remote {
                Some(url) => {
                    let req = SimulateRequest { set: remote_name(&dice)?, a: a.clone(), b: b.clone(), r, trials, seed };
                    match block_on(Client::new(url).simulate(&req))? {
                        Ok(r) => r,
                        Err(e) => return client_failure(&p, e),
                    }
                }
                None => {
                    let ds = load_dice(&dice)?;
                    let die = |l: &str| ds.by_label(l).ok_or_else(|| anyhow!("unknown die label {l:?}"));
                    let (da, db) = (die(&a)?, die(&b)?);
                    SimulateResponse::new(simulate(da, db, r, trials, seed)?, &win_odds(da, db, r)?)
                }
            };
            p.emit(serde_json::to_value(&resp)?, || {
                format!(
                    "{a} vs {b}, {r} roll(s), {trials} trials: {} wins, {} ties, {} losses\nexact: {}\n",
                    resp.wins,
                    resp.ties,
                    resp.losses,
                    show_odds(&resp.exact)
                )
            });
            Ok(Status::Yes)
        }
        Command::DiceSearch(a) => dice_search(&p, a),
        Command::Serve { addr, fixtures } => {
            let state = match fixtures {
                Some(dir) => AppState::load(Some(&dir))?,
                None => AppState::from_env()?,
            };
            let rt = tokio::runtime::Runtime::new()?;
            rt.block_on(schutte_server::serve(addr, state))?;
            Ok(Status::Yes)
        }
    }
}

fn read_set(path: &Path) -> Result<TournamentSet> {
    let text = fs::read_to_string(path).with_context(|| format!("reading {}", path.display()))?;
    parse_tournament_set(&text).with_context(|| format!("parsing {}", path.display()))
}

fn write_set(p: &Printer, out: &Output, set: &TournamentSet) -> Result<Status> {
    let text = write_tournament_set(set);
    match &out.out {
        Some(path) => {
            fs::write(path, &text).with_context(|| format!("writing {}", path.display()))?;
            p.emit(json!({"n": set.order(), "m": set.len(), "path": path}), || {
                format!("wrote {} tournament(s) on {} vertices to {}\n", set.len(), set.order(), path.display())
            });
        }
        None => print!("{text}"),
    }
    Ok(Status::Yes)
}

fn fill_policy(fill: &Fill) -> FillPolicy {
    fill.seed.map_or(FillPolicy::LowBeatsHigh, FillPolicy::Seeded)
}

fn bound(p: &Printer, k: usize, m: usize) -> Result<Status> {
    let show = |r: Result<u64, BoundsError>| match r {
        Ok(v) => (json!(v), v.to_string()),
        Err(e) => (json!({"error": e.to_string()}), format!("n/a ({e})")),
    };
    let rows = [
        ("erdos_lower", "f(k) >=", show(erdos_lower(k))),
        ("szekeres_lower", "f(k) >=", show(szekeres_lower(k))),
        ("erdos_upper", "f(k) <=", show(erdos_upper(k))),
        ("closed_form_upper", "f(m,k) <=", show(closed_form_upper(m, k))),
        ("coarse_upper", "f(m,k) <=", show(coarse_upper(m, k))),
        ("split_dp_upper", "f(m,k) <=", show(split_dp_upper(m, k).map(|e| e.upper))),
    ];
    let mut obj = serde_json::Map::new();
    obj.insert("k".into(), json!(k));
    obj.insert("m".into(), json!(m));
    for (name, _, (v, _)) in &rows {
        obj.insert((*name).into(), v.clone());
    }
    p.emit(Value::Object(obj), || {
        rows.iter().map(|(name, rel, (_, h))| format!("{name:<18} {rel:<10} {h}\n")).collect()
    });
    Ok(Status::Yes)
}

fn symmetry(instance: &Instance) -> SymmetryOptions {
    if instance.no_symmetry {
        SymmetryOptions::none()
    } else {
        SymmetryOptions::default()
    }
}

fn sat_find(p: &Printer, a: SatFind) -> Result<Status> {
    let SatFind { instance, n, n_max, max_conflicts, timeout, external, out } = a;
    let (m, k) = (instance.m, instance.k);
    let sym = symmetry(&instance);
    let budget = Budget { max_conflicts, max_decisions: None, max_time: timeout.map(Duration::from_secs_f64) };
    if let Some(path) = external {
        let n = n.expect("clap requires --n with --external");
        let (_, vm) = encode(m, k, n, sym)?;
        let text = fs::read_to_string(&path).with_context(|| format!("reading {}", path.display()))?;
        return match verify_external(&vm, &parse_solver_output(&text)?)? {
            ExternalVerdict::Verified(set) => {
                if !p.json && out.out.is_none() {
                    println!("external model verified: S_{k} {m}-set of order {n}");
                }
                write_set(p, &out, &set)
            }
            ExternalVerdict::UnsatClaim => {
                p.emit(json!({"status": "unsat-claim"}), || {
                    "external solver claims UNSAT (not independently attested)\n".into()
                });
                Ok(Status::No)
            }
            ExternalVerdict::Unknown => {
                p.emit(json!({"status": "unknown"}), || "external solver returned UNKNOWN\n".into());
                Ok(Status::Unknown)
            }
        };
    }
    match (n, n_max) {
        (Some(n), _) => {
            let v = search_set(m, k, n, sym, &budget)?;
            let (label, status) = match &v.status {
                SearchStatus::Sat(_) => ("sat", Status::Yes),
                SearchStatus::Unsat => ("unsat", Status::No),
                SearchStatus::Unknown => ("unknown", Status::Unknown),
            };
            let set = match &v.status {
                SearchStatus::Sat(set) => Some(set),
                _ => None,
            };
            if let (Some(set), Some(path)) = (set, &out.out) {
                fs::write(path, write_tournament_set(set))?;
            }
            p.emit(
                json!({
                    "status": label, "m": m, "k": k, "n": n,
                    "stats": v.stats, "config_hash": v.config_hash,
                    "set": set.map(TournamentSetFile::from),
                }),
                || {
                    let mut s = format!(
                        "{}: S_{k} {m}-set of order {n} ({} conflicts, {} ms, config {})\n",
                        label.to_uppercase(),
                        v.stats.conflicts,
                        v.stats.elapsed_ms,
                        v.config_hash
                    );
                    if let (Some(set), None) = (set, &out.out) {
                        s += &write_tournament_set(set);
                    }
                    s
                },
            );
            Ok(status)
        }
        (None, Some(n_max)) => {
            let r = f_exact(m, k, n_max, sym, &budget);
            let steps: Vec<Value> = r
                .steps
                .iter()
                .map(|s| json!({"n": s.n, "status": s.status, "stats": s.stats, "config_hash": s.config_hash}))
                .collect();
            let (summary, status, cert) = match &r.outcome {
                FOutcome::Exact { value, certificate } => (json!({"exact": value}), Status::Yes, Some(certificate)),
                FOutcome::Bracketed { lower, upper, certificate } => {
                    (json!({"lower": lower, "upper": upper}), Status::Unknown, certificate.as_ref())
                }
                FOutcome::AboveLimit { n_max } => (json!({"above": n_max}), Status::No, None),
            };
            if let (Some(set), Some(path)) = (cert, &out.out) {
                fs::write(path, write_tournament_set(set))?;
            }
            p.emit(json!({"m": m, "k": k, "outcome": summary, "steps": steps}), || {
                let mut s = String::new();
                for st in &r.steps {
                    let tag = match st.status {
                        StepStatus::Sat => "SAT",
                        StepStatus::Unsat => "UNSAT",
                        StepStatus::Unknown => "UNKNOWN",
                    };
                    s += &format!(
                        "n={:<3} {tag:<8} {} conflicts, {} ms\n",
                        st.n, st.stats.conflicts, st.stats.elapsed_ms
                    );
                }
                s += &match &r.outcome {
                    FOutcome::Exact { value, .. } => format!("f({m},{k}) = {value}\n"),
                    FOutcome::Bracketed { lower, upper: Some(u), .. } => format!("{lower} <= f({m},{k}) <= {u}\n"),
                    FOutcome::Bracketed { lower, upper: None, .. } => format!("f({m},{k}) >= {lower}\n"),
                    FOutcome::AboveLimit { n_max } => format!("f({m},{k}) > {n_max}\n"),
                };
                s
            });
            Ok(status)
        }
        (None, None) => bail!("sat-find needs --n or --n-max"),
    }
}

fn load_dice(src: &DiceSource) -> Result<DiceSet> {
    match (&src.set, &src.dice_file) {
        (Some(name), _) => fixtures::builtin()
            .into_iter()
            .find(|s| s.name() == name)
            .ok_or_else(|| anyhow!("no built-in dice set named {name:?}")),
        (None, Some(path)) => {
            let text = fs::read_to_string(path).with_context(|| format!("reading {}", path.display()))?;
            parse_dice_set(&text).with_context(|| format!("parsing {}", path.display()))
        }
        (None, None) => bail!("give --set or --dice-file"),
    }
}

fn remote_name(src: &DiceSource) -> Result<String> {
    src.set.clone().ok_or_else(|| anyhow!("--remote needs --set; dice files are only read locally"))
}

fn block_on<F: std::future::Future>(f: F) -> Result<F::Output> {
    Ok(tokio::runtime::Builder::new_current_thread().enable_all().build()?.block_on(f))
}

/// 409 means the set lacks the property (exit 1); anything else is an error.
fn client_failure(p: &Printer, e: ClientError) -> Result<Status> {
    match e {
        ClientError::Api { status, body } if status.as_u16() == 409 => match &body.matrix {
            Some(m) => no_choice(p, m),
            None => {
                eprintln!("{}", body.message);
                Ok(Status::No)
            }
        },
        e => Err(e.into()),
    }
}

fn no_choice(p: &Printer, m: &Matrix) -> Result<Status> {
    if p.json {
        println!("{}", json!({"error": "no_dominating_choice", "matrix": m}));
    } else {
        eprintln!("no die beats every opponent");
        eprint!("{}", matrix_text(m));
    }
    Ok(Status::No)
}

fn matrix_text(m: &Matrix) -> String {
    let mut s = String::new();
    for row in &m.rows {
        let cells: Vec<String> =
            m.opponents.iter().zip(&row.odds).map(|(o, odds)| format!("{o}: {}", show(&odds.win))).collect();
        s += &format!("  {} at r={}: {}\n", row.die, row.rolls, cells.join(", "));
    }
    s
}

fn show(q: &Rational) -> String {
    format!("{}/{} ({:.4})", q.num, q.den, q.approx)
}

fn show_odds(o: &Odds) -> String {
    format!("win {}, tie {}, loss {}", show(&o.win), show(&o.tie), show(&o.loss))
}

fn response_set(resp: &TournamentsResponse) -> Result<TournamentSet> {
    let n = resp.labels.len();
    let members = resp
        .tournaments
        .iter()
        .map(|t| {
            let pairs: Vec<(usize, usize)> = t.edges.iter().map(|&[i, j]| (i, j)).collect();
            Tournament::new(n, &pairs)
        })
        .collect::<Result<Vec<_>, _>>()?;
    Ok(TournamentSet::new(members)?)
}

fn dice_verify(p: &Printer, src: &DiceSource, m: u32, k: Option<usize>) -> Result<Status> {
    let ds = load_dice(src)?;
    let k = k.unwrap_or(ds.len().saturating_sub(1));
    let set = match realized_set(&ds, m, &BigRational::zero()) {
        Ok(set) => set,
        Err(e) if is_tie_or_margin(&e) => {
            p.emit(json!({"sk": false, "error": e.to_string()}), || format!("not a tournament set: {e}\n"));
            return Ok(Status::No);
        }
        Err(e) => return Err(e.into()),
    };
    let resp = TournamentsResponse::compute(&ds, m)?;
    let dominator_min = min_dominator_probability(&ds, m)?.map(|q| Rational::from(&q));
    let holds = is_sk(&set, k);
    let dominators: Vec<Vec<String>> = set
        .members()
        .iter()
        .map(|t| {
            (0..ds.len())
                .filter(|&v| t.out_degree(v) + 1 == ds.len())
                .map(|v| ds.dice()[v].label().to_string())
                .collect()
        })
        .collect();
    p.emit(
        json!({
            "name": ds.name(), "m": m, "k": k, "sk": holds,
            "dominators": dominators,
            "min_edge_probability": resp.min_edge_probability,
            "min_dominator_probability": dominator_min,
            "tournaments": resp.tournaments,
        }),
        || {
            let mut s = String::new();
            for (r, d) in dominators.iter().enumerate() {
                s += &format!(
                    "r={}: beats all others: {}\n",
                    r + 1,
                    if d.is_empty() { "-".into() } else { d.join(",") }
                );
            }
            s += &format!("min edge probability: {}\n", show(&resp.min_edge_probability));
            if let Some(q) = &dominator_min {
                s += &format!("min probability of a die beating all others: {}\n", show(q));
            }
            s += &format!("S_{k}: {holds}\n");
            s
        },
    );
    Ok(Status::from_bool(holds))
}

fn dice_search(p: &Printer, a: DiceSearch) -> Result<Status> {
    let targets = read_set(&a.target)?;
    let space = SearchSpace {
        faces_per_die: a.faces,
        max_face: a.max_face,
        alphabet: a.alphabet,
        max_nodes: a.max_nodes,
        max_time: a.timeout.map(Duration::from_secs_f64),
        shuffle_seed: a.seed,
        require_majority: !a.allow_sub_majority,
    };
    let r = search_multiroll(&targets, &space)?;
    let stats = json!(r.stats);
    match r.outcome {
        DiceSearchOutcome::Found(ds) => {
            let text = write_dice_set(&ds);
            if let Some(path) = &a.out {
                fs::write(path, &text).with_context(|| format!("writing {}", path.display()))?;
            }
            p.emit(json!({"status": "found", "stats": stats, "dice": serde_json::from_str::<Value>(&text)?}), || {
                format!("found after {} nodes\n{text}", r.stats.nodes)
            });
            Ok(Status::Yes)
        }
        DiceSearchOutcome::Exhausted => {
            p.emit(json!({"status": "exhausted", "stats": stats}), || {
                format!("no dice in this space ({} nodes)\n", r.stats.nodes)
            });
            Ok(Status::No)
        }
        DiceSearchOutcome::Unknown => {
            p.emit(json!({"status": "unknown", "stats": stats}), || {
                format!("budget exhausted after {} nodes\n", r.stats.nodes)
            });
            Ok(Status::Unknown)
        }
    }
}

fn is_tie_or_margin(e: &DiceError) -> bool {
    matches!(e, DiceError::TiedPair { .. } | DiceError::MarginViolation { .. })
}
