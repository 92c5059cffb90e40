use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};

use crate::engine::eval_paths;
use crate::error::{FrogError, Result};
use crate::formula::{Cnf, Literal, Qbf, Quantifier};
use crate::gadgets::builder::{Draft, GameBuilder};
use crate::gadgets::loosener::{build_loosener, LoosenerSpec};
use crate::model::{AgentId, EdgeIdx, Instance, Path, PathProfile, RuleKind, VertexId};

/// Knobs shared by all reductions.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct ReduceOptions {
    /// RO or RR; every scripted agent has a single path, so both behave alike.
    pub rule: RuleKind,
    /// Red agents per loosener; by default just enough that a detour
    /// through a loosener ends after every delay that matters.
    pub red_count: Option<u32>,
    /// Replace start rounds by private runways so every agent starts at 0.
    pub strict_def1: bool,
}

impl Default for ReduceOptions {
    fn default() -> Self {
        ReduceOptions { rule: RuleKind::Ro, red_count: None, strict_def1: false }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Variant {
    /// Plain best-response or winning-strategy game.
    Plain,
    /// Extra final edge with `M` blockers behind the agent of interest.
    Padded(u32),
    /// Shared final edge on which an on-time existential agent delays the
    /// universal one.
    SpeRr,
}

/// Rounds measured on the unloaded game.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct CalibratedRounds {
    /// Per variable, the round the choosing agent is on a literal edge.
    pub triggers: Vec<u32>,
    /// Per clause, the round the agent of interest is on its first edge.
    pub consequences: Vec<u32>,
    /// Edges between the last variable and the first clause.
    pub connector_len: u32,
}

/// Sidecar description of a reduction output.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Manifest {
    pub formula_hash: String,
    pub m: usize,
    pub p: usize,
    pub theta: u32,
    pub agent_of_interest: AgentId,
    #[serde(skip_serializing_if = "Option::is_none", default)]
    pub universal: Option<AgentId>,
    pub calibrated_rounds: CalibratedRounds,
}

/// A game compiled from a formula.
#[derive(Clone, Debug)]
pub struct Reduction {
    pub instance: Instance,
    pub agent_of_interest: AgentId,
    pub universal: Option<AgentId>,
    /// Plain: the agent finishes by `theta` iff the formula holds. Padded:
    /// the optimum is `theta` when it holds and `theta + M` otherwise.
    /// SpeRr: the round in which the existential agent completes the
    /// clause chain when on time.
    pub theta: u32,
    pub m: usize,
    pub p: usize,
    pub rounds: CalibratedRounds,
    /// Scripted paths; strategic agents have empty entries.
    pub adversary_paths: PathProfile,
    /// Route used for calibration per strategic agent (positive literals,
    /// first literal of every clause).
    pub canonical_paths: BTreeMap<AgentId, Path>,
    pub labels: Vec<String>,
    pub formula: Qbf,
    pub formula_hash: String,
    pub variant: Variant,
    pub options: ReduceOptions,
}

impl Reduction {
    pub fn manifest(&self) -> Manifest {
        Manifest {
            formula_hash: self.formula_hash.clone(),
            m: self.m,
            p: self.p,
            theta: self.theta,
            agent_of_interest: self.agent_of_interest,
            universal: self.universal,
            calibrated_rounds: self.rounds.clone(),
        }
    }

    /// Adversary profile in which the universal agent, if any, follows her
    /// canonical route. When she quantifies nothing that route is her only one.
    pub fn adversary_profile(&self) -> PathProfile {
        let mut out = self.adversary_paths.clone();
        if let Some(u) = self.universal {
            out[u.index()] = self.canonical_paths[&u].clone();
        }
        out
    }

    /// Number of scripted agents.
    pub fn scripted(&self) -> usize {
        self.adversary_paths.iter().filter(|p| !p.is_empty()).count()
    }
}

/// 3SAT to best response: the agent reaches her sink by `theta` iff the
/// formula is satisfiable, against the scripted agents' fixed paths.
pub fn reduce_3sat(cnf: &Cnf, options: &ReduceOptions) -> Result<Reduction> {
    let qbf = Qbf::existential(cnf.clone());
    let mut r = compile(&qbf, false, Variant::Plain, options)?;
    r.formula_hash = cnf.hash();
    Ok(r)
}

/// QSAT to winning strategy: agent 1 (existential) can guarantee delay
/// `theta` iff the formula is true; agent 2 plays the universal variables.
pub fn reduce_qsat(qbf: &Qbf, options: &ReduceOptions) -> Result<Reduction> {
    compile(qbf, true, Variant::Plain, options)
}

/// The QSAT game with one more edge at the end of the clause chain that `m`
/// blockers enter together with an on-time existential agent.
pub fn pad_inapprox(reduced: &Reduction, m: u32) -> Result<Reduction> {
    if m == 0 {
        return Err(FrogError::Gadget("padding needs at least one blocker".into()));
    }
    compile(&reduced.formula, reduced.universal.is_some(), Variant::Padded(m), &reduced.options)
}

/// QSAT to subgame perfect equilibrium under RR.
pub fn reduce_qsat_spe_rr(qbf: &Qbf, options: &ReduceOptions) -> Result<Reduction> {
    let options = ReduceOptions { rule: RuleKind::Rr, ..*options };
    compile(qbf, true, Variant::SpeRr, &options)
}

/// Vertices and edges of the game without gadgets.
#[derive(Clone, Debug)]
struct Host {
    builder: GameBuilder,
    exists: usize,
    universal: Option<usize>,
    /// Per variable: the chooser slot and the literal edges (positive, negative).
    literal_edges: Vec<(usize, EdgeIdx, EdgeIdx)>,
    /// Per clause: distinct literals with the first edge of their path.
    clause_edges: Vec<Vec<(Literal, EdgeIdx)>>,
    canonical: BTreeMap<usize, Path>,
    c_last: VertexId,
    y_last: Option<VertexId>,
}

fn host(qbf: &Qbf, two_players: bool, connector: u32) -> Host {
    let m = qbf.matrix.vars as usize;
    let p = qbf.matrix.clauses.len();
    let mut b = GameBuilder::new();
    let x: Vec<VertexId> = (1..=m + 1).map(|k| b.vertex(&format!("x{k}"))).collect();
    let y: Vec<VertexId> = if two_players { (1..=m + 1).map(|k| b.vertex(&format!("y{k}"))).collect() } else { vec![] };
    let c: Vec<VertexId> = (1..=p + 1).map(|j| b.vertex(&format!("C{j}"))).collect();

    let exists = b.agent(Draft { label: "exists".into(), source: x[0], sink: c[p], start_round: 0, script: None });
    let universal = two_players.then(|| {
        b.agent(Draft { label: "forall".into(), source: y[0], sink: y[m], start_round: 0, script: None })
    });
    let mut canonical: BTreeMap<usize, Path> = BTreeMap::new();
    canonical.insert(exists, Vec::new());
    if let Some(u) = universal {
        canonical.insert(u, Vec::new());
    }

    let mut literal_edges = Vec::with_capacity(m);
    for (k, &(q, _)) in qbf.prefix.iter().enumerate() {
        let on_y = q == Quantifier::Forall;
        let (chooser, chain, other) = match (on_y, universal) {
            (true, Some(u)) => (u, &y, Some((exists, &x))),
            _ => (exists, &x, universal.map(|u| (u, &y))),
        };
        let name = if on_y { 'y' } else { 'x' };
        let pos_mid = b.vertex(&format!("{name}{}+", k + 1));
        let neg_mid = b.vertex(&format!("{name}{}-", k + 1));
        let pos = b.edge(chain[k], pos_mid);
        let pos2 = b.edge(pos_mid, chain[k + 1]);
        let neg = b.edge(chain[k], neg_mid);
        b.edge(neg_mid, chain[k + 1]);
        canonical.get_mut(&chooser).unwrap().extend([pos, pos2]);
        if let Some((slot, chain)) = other {
            let tag = if on_y { 'x' } else { 'y' };
            let forced = b.chain(chain[k], chain[k + 1], 3, &format!("{tag}{}=", k + 1));
            canonical.get_mut(&slot).unwrap().extend(forced);
        }
        literal_edges.push((chooser, pos, neg));
    }

    let conn = b.chain(x[m], c[0], connector as usize, "link");
    canonical.get_mut(&exists).unwrap().extend(conn);

    let mut clause_edges = Vec::with_capacity(p);
    for (j, clause) in qbf.matrix.clauses.iter().enumerate() {
        let mut lits: Vec<Literal> = Vec::new();
        for &l in clause {
            if !lits.contains(&l) {
                lits.push(l);
            }
        }
        let mut edges = Vec::new();
        for (n, &l) in lits.iter().enumerate() {
            let mid = b.vertex(&format!("C{}:{}", j + 1, l));
            let g = b.edge(c[j], mid);
            let g2 = b.edge(mid, c[j + 1]);
            if n == 0 {
                canonical.get_mut(&exists).unwrap().extend([g, g2]);
            }
            edges.push((l, g));
        }
        clause_edges.push(edges);
    }
    Host { builder: b, exists, universal, literal_edges, clause_edges, canonical, c_last: c[p], y_last: y.last().copied() }
}

/// Entry rounds of every strategic agent along her canonical route with
/// darks on every literal edge of the first `vars` variables.
fn simulate(h: &Host, triggers: &[u32]) -> Result<(Vec<Vec<u32>>, Vec<crate::model::Delay>)> {
    let mut b = h.builder.clone();
    let strategic: Vec<usize> = h.canonical.keys().copied().collect();
    for (k, &r) in triggers.iter().enumerate() {
        let (chooser, pos, neg) = h.literal_edges[k];
        for e in [pos, neg] {
            let (t, hd) = (b.graph.tail(e), b.graph.head(e));
            let d = b.agent(Draft { label: format!("dark{k}"), source: t, sink: hd, start_round: r - 1, script: Some(vec![e]) });
            b.prefer(d, chooser);
        }
    }
    let built = b.finish(RuleKind::Ro, false)?;
    let mut profile = built.scripts.clone();
    for &s in &strategic {
        profile[s] = h.canonical[&s].clone();
    }
    let out = eval_paths(&built.instance, &profile)?;
    Ok((out.entry_rounds, out.delays))
}

fn entry_of(h: &Host, rounds: &[Vec<u32>], slot: usize, edge: EdgeIdx) -> u32 {
    let hop = h.canonical[&slot].iter().position(|&e| e == edge).expect("edge on canonical route");
    rounds[slot][hop]
}

fn compile(qbf: &Qbf, two_players: bool, variant: Variant, options: &ReduceOptions) -> Result<Reduction> {
    if options.rule == RuleKind::Re {
        return Err(FrogError::WrongRule { expected: "RO or RR", found: "RE" });
    }
    let qbf = qbf.in_prefix_order();
    if !two_players && qbf.prefix.iter().any(|(q, _)| *q == Quantifier::Forall) {
        return Err(FrogError::Gadget("universal variables need the two-player reduction".into()));
    }
    let m = qbf.matrix.vars as usize;
    let p = qbf.matrix.clauses.len();
    if m == 0 || p == 0 {
        return Err(FrogError::Gadget("formula needs at least one variable and one clause".into()));
    }

    // max(p, 4) leaves every loosener room for its gamma edges; the loop
    // only guards against miscalibration
    let mut connector = (p as u32).max(4);
    let (h, triggers, consequences, theta) = loop {
        let h = host(&qbf, two_players, connector);
        let mut triggers = Vec::with_capacity(m);
        for k in 0..m {
            let (rounds, _) = simulate(&h, &triggers)?;
            let (chooser, pos, _) = h.literal_edges[k];
            triggers.push(entry_of(&h, &rounds, chooser, pos));
        }
        let (rounds, delays) = simulate(&h, &triggers)?;
        let consequences: Vec<u32> =
            h.clause_edges.iter().map(|edges| entry_of(&h, &rounds, h.exists, edges[0].1)).collect();
        let theta = delays[h.exists].finite().expect("canonical route finishes");
        let fits = specs(&h, &triggers, &consequences, 1).iter().all(|s| s.check().is_ok());
        if fits {
            break (h, triggers, consequences, theta);
        }
        connector += 1;
        if connector > 4 * (p as u32 + 4) {
            return Err(FrogError::Gadget("could not calibrate the connector".into()));
        }
    };

    let horizon = match variant {
        Variant::Plain => theta + 1,
        Variant::Padded(big) => theta + big + 1,
        Variant::SpeRr => theta + 2,
    };
    let Host { mut builder, exists, universal, c_last, y_last, mut canonical, .. } = h.clone();
    let b = &mut builder;
    let mut scripted_tail = Vec::new();
    for (k, spec) in specs(&h, &triggers, &consequences, 1).into_iter().enumerate() {
        let spec = LoosenerSpec { red_count: options.red_count.unwrap_or(horizon.saturating_sub(spec.trigger_round).max(1)), ..spec };
        let bp = build_loosener(&b.graph, &spec)?;
        let chooser = h.literal_edges[k / 2].0;
        let slots = b.splice(&bp, Some(chooser));
        scripted_tail.push(*slots.last().unwrap());
    }
    for &s in &scripted_tail {
        b.prefer(s, exists);
    }
    if let Some(u) = universal {
        b.prefer(exists, u);
    }

    let mut theta_out = theta;
    match variant {
        Variant::Plain => {}
        Variant::Padded(big) => {
            let fin = b.vertex("fin");
            let last = b.edge(c_last, fin);
            b.set_sink(exists, fin);
            canonical.get_mut(&exists).unwrap().push(last);
            for k in 1..=big {
                let blocker = b.agent(Draft {
                    label: format!("blocker{k}"),
                    source: c_last,
                    sink: fin,
                    start_round: theta,
                    script: Some(vec![last]),
                });
                b.prefer(exists, blocker);
                if let Some(u) = universal {
                    b.prefer(u, blocker);
                }
            }
            theta_out = theta + 1;
        }
        Variant::SpeRr => {
            let u = universal.expect("two players");
            let fin = b.vertex("fin");
            let last = b.edge(c_last, fin);
            // the universal agent reaches C_{p+1} in the round the
            // on-time existential agent does
            let y_end = y_last.expect("y chain");
            let span = theta - 3 * m as u32;
            let link = b.chain(y_end, c_last, span as usize, "ylink");
            b.set_sink(exists, fin);
            b.set_sink(u, fin);
            canonical.get_mut(&exists).unwrap().push(last);
            let route = canonical.get_mut(&u).unwrap();
            route.extend(link);
            route.push(last);
        }
    }
    let built = builder.finish(options.rule, options.strict_def1)?;
    let mut adversary_paths = built.scripts.clone();
    for s in canonical.keys() {
        adversary_paths[*s] = Vec::new();
    }
    let canonical_paths = canonical.into_iter().map(|(s, p)| (AgentId::from_index(s), p)).collect();
    Ok(Reduction {
        instance: built.instance,
        agent_of_interest: AgentId::from_index(exists),
        universal: universal.map(AgentId::from_index),
        theta: theta_out,
        m,
        p,
        rounds: CalibratedRounds { triggers, consequences, connector_len: connector },
        adversary_paths,
        canonical_paths,
        labels: built.labels,
        formula_hash: qbf.hash(),
        formula: qbf,
        variant,
        options: *options,
    })
}

/// Two looseners per variable (positive literal first), each freeing the
/// clause paths of its literal in clause order.
fn specs(h: &Host, triggers: &[u32], consequences: &[u32], red_count: u32) -> Vec<LoosenerSpec> {
    let mut out = Vec::new();
    for (k, &(_, pos, neg)) in h.literal_edges.iter().enumerate() {
        let var = k as Literal + 1;
        for (lit, e) in [(var, pos), (-var, neg)] {
            let cons: Vec<(EdgeIdx, u32)> = h
                .clause_edges
                .iter()
                .enumerate()
                .filter_map(|(j, edges)| edges.iter().find(|(l, _)| *l == lit).map(|&(_, g)| (g, consequences[j])))
                .collect();
            let sign = if lit > 0 { '+' } else { '-' };
            out.push(LoosenerSpec {
                tag: format!("L{}{sign}", k + 1),
                trigger_edge: e,
                trigger_round: triggers[k],
                consequences: cons,
                red_count,
            });
        }
    }
    out
}
