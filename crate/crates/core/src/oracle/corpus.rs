//! Program families for the library-level checks: cut programs with their
//! `scope`/`cut` translation, exclusive PRISM programs with their exact
//! probability, and BSP trees with a linear-scan nearest neighbour.

use std::cmp::Ordering;

use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::reader::{parse_program, ReadError, SourceClause};
use crate::terms::{format_term, NoBindings, Term};

// ---------------------------------------------------------------- cut

/// A program using `!`, the same program rewritten with `scope/1` and
/// `cut/0`, and a query over both.
#[derive(Debug, Clone, PartialEq)]
pub struct CutProgram {
    pub source: String,
    pub translated: String,
    pub query: String,
}

fn contains_cut(body: &Term) -> bool {
    match body.as_compound() {
        Some(c) if matches!((c.name(), c.arity()), (",", 2) | (";", 2) | ("->", 2)) => {
            c.args().iter().any(contains_cut)
        }
        _ => body.is_atom("!"),
    }
}

fn replace_cut(body: &Term) -> Term {
    match body.as_compound() {
        Some(c) if matches!((c.name(), c.arity()), (",", 2) | (";", 2) | ("->", 2)) => {
            Term::compound(c.name(), c.args().iter().map(replace_cut).collect())
        }
        _ if body.is_atom("!") => Term::atom("cut"),
        _ => body.clone(),
    }
}

fn rename(head: &Term, name: &str) -> Term {
    match head.as_compound() {
        Some(c) => Term::compound(name, c.args().to_vec()),
        None => Term::atom(name),
    }
}

fn show(t: &Term) -> String {
    format_term(t, &NoBindings)
}

/// Rewrites every predicate whose clauses use `!` into a wrapper
/// `p(Args) :- scope(p_cut(Args))` plus the original clauses renamed to
/// `p_cut` with `!` replaced by `cut`. Cuts inside if-then-else conditions
/// are not supported.
pub fn translate_cut(source: &str) -> Result<String, ReadError> {
    let clauses = parse_program(source)?;
    let mut with_cut: Vec<(String, usize)> = Vec::new();
    for c in &clauses {
        let key = c
            .head
            .functor()
            .map(|(n, a)| (n.to_string(), a))
            .expect("clause heads are callable");
        if contains_cut(&c.body) && !with_cut.contains(&key) {
            with_cut.push(key);
        }
    }
    let mut out = Vec::new();
    let mut wrapped: Vec<&(String, usize)> = Vec::new();
    for SourceClause { head, body, .. } in &clauses {
        let (name, arity) = head.functor().expect("clause heads are callable");
        let Some(key) = with_cut.iter().find(|(n, a)| n == name && *a == arity) else {
            out.push(format!("{} :- {}.", show(head), show(body)));
            continue;
        };
        let aux = format!("{name}_cut");
        if !wrapped.contains(&key) {
            wrapped.push(key);
            let args: Vec<Term> = (0..arity).map(Term::var).collect();
            let call = if arity == 0 {
                Term::atom(name)
            } else {
                Term::compound(name, args.clone())
            };
            let inner = rename(&call, &aux);
            out.push(format!("{} :- scope({}).", show(&call), show(&inner)));
        }
        out.push(format!(
            "{} :- {}.",
            show(&rename(head, &aux)),
            show(&replace_cut(body))
        ));
    }
    let mut text = out.join("\n");
    text.push('\n');
    Ok(text)
}

/// The cut example from the literature: `p(X,Y) :- q(X), !, r(Y).`
pub const CLASSIC_CUT: &str = "p(X, Y) :- q(X), !, r(Y).\np(4, 2).\nq(1).\nq(2).\nr(a).\nr(b).\n";

fn facts(rng: &mut ChaCha8Rng, name: &str, pool: &[&str]) -> Vec<String> {
    let n = rng.random_range(1..=3);
    (0..n)
        .map(|_| format!("{name}({}).", pool[rng.random_range(0..pool.len())]))
        .collect()
}

fn cut_literal(rng: &mut ChaCha8Rng) -> String {
    match rng.random_range(0..7) {
        0 | 1 => "q(X)".to_string(),
        2 => "r(Y)".to_string(),
        3 => "s(X, Y)".to_string(),
        4 => format!("X = {}", rng.random_range(1..=3)),
        5 => "(q(X) ; r(Y))".to_string(),
        _ => "(q(X), ! ; r(Y))".to_string(),
    }
}

/// A random program where `p/2` uses cut over the fact tables `q/1`,
/// `r/1` and `s/2`, and `top/2` calls `p/2` next to an alternative.
pub fn gen_cut_program(seed: u64) -> CutProgram {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut lines = Vec::new();
    for _ in 0..rng.random_range(2..=3) {
        let head = match rng.random_range(0..4) {
            0 => format!("p({}, Y)", rng.random_range(1..=3)),
            1 => "p(X, c)".to_string(),
            _ => "p(X, Y)".to_string(),
        };
        let mut body: Vec<String> = (0..rng.random_range(0..=3))
            .map(|_| cut_literal(&mut rng))
            .collect();
        if rng.random_bool(0.85) {
            let at = rng.random_range(0..=body.len());
            body.insert(at, "!".to_string());
        }
        if body.is_empty() {
            lines.push(format!("{head}."));
        } else {
            lines.push(format!("{head} :- {}.", body.join(", ")));
        }
    }
    lines.extend(facts(&mut rng, "q", &["1", "2", "3"]));
    lines.extend(facts(&mut rng, "r", &["a", "b", "c"]));
    lines.extend(facts(&mut rng, "s", &["1, a", "2, b", "3, c", "1, c"]));
    lines.push("top(X, Y) :- p(X, Y).".to_string());
    lines.push("top(z, z).".to_string());
    let mut source = lines.join("\n");
    source.push('\n');
    let translated = translate_cut(&source).expect("generated cut programs parse");
    let query = if rng.random_bool(0.5) {
        "top(X, Y)"
    } else {
        "p(X, Y)"
    };
    CutProgram {
        source,
        translated,
        query: query.to_string(),
    }
}

/// The classic example followed by `n - 1` generated programs.
pub fn cut_corpus(n: usize) -> Vec<CutProgram> {
    let classic = CutProgram {
        source: CLASSIC_CUT.to_string(),
        translated: translate_cut(CLASSIC_CUT).expect("valid"),
        query: "p(X, Y)".to_string(),
    };
    std::iter::once(classic)
        .chain((1..n as u64).map(gen_cut_program))
        .take(n)
        .collect()
}

// ---------------------------------------------------------------- PRISM

/// Goal structure of a generated PRISM program. Each `Msw` is one call
/// site; its cases are indexed by the switch's value, and a missing case
/// fails. Distinct values make every disjunction exclusive.
#[derive(Debug, Clone, PartialEq)]
pub enum PrismNode {
    True,
    Fail,
    Msw {
        site: usize,
        switch: usize,
        cases: Vec<Option<PrismNode>>,
    },
    And(Box<PrismNode>, Box<PrismNode>),
}

#[derive(Debug, Clone, PartialEq)]
pub struct PrismProgram {
    /// Value probabilities per switch.
    pub switches: Vec<Vec<f64>>,
    pub goal: PrismNode,
    /// Number of call sites.
    pub sites: usize,
}

impl PrismNode {
    fn render(&self) -> String {
        match self {
            PrismNode::True => "true".to_string(),
            PrismNode::Fail => "fail".to_string(),
            PrismNode::And(a, b) => format!("({}), ({})", a.render(), b.render()),
            PrismNode::Msw {
                site,
                switch,
                cases,
            } => {
                let v = format!("V{site}");
                let arms: Vec<String> = cases
                    .iter()
                    .enumerate()
                    .filter_map(|(i, c)| {
                        c.as_ref().map(|c| format!("{v} = v{i}, ({})", c.render()))
                    })
                    .collect();
                let rest = if arms.is_empty() {
                    "fail".to_string()
                } else {
                    arms.join(" ; ")
                };
                format!("msw(s{switch}, {v}), ({rest})")
            }
        }
    }

    fn succeeds(&self, world: &[usize]) -> bool {
        match self {
            PrismNode::True => true,
            PrismNode::Fail => false,
            PrismNode::And(a, b) => a.succeeds(world) && b.succeeds(world),
            PrismNode::Msw { site, cases, .. } => cases[world[*site]]
                .as_ref()
                .is_some_and(|c| c.succeeds(world)),
        }
    }

    fn site_switches(&self, out: &mut Vec<(usize, usize)>) {
        match self {
            PrismNode::True | PrismNode::Fail => {}
            PrismNode::And(a, b) => {
                a.site_switches(out);
                b.site_switches(out);
            }
            PrismNode::Msw {
                site,
                switch,
                cases,
            } => {
                out.push((*site, *switch));
                cases.iter().flatten().for_each(|c| c.site_switches(out));
            }
        }
    }
}

impl PrismProgram {
    /// Program text defining `values_x/3` and the goal `g/0`.
    pub fn source(&self) -> String {
        let mut out = String::new();
        for (i, probs) in self.switches.iter().enumerate() {
            let values: Vec<String> = (0..probs.len()).map(|v| format!("v{v}")).collect();
            let probs: Vec<String> = probs.iter().map(|p| format!("{p:?}")).collect();
            out.push_str(&format!(
                "values_x(s{i}, [{}], [{}]).\n",
                values.join(","),
                probs.join(",")
            ));
        }
        out.push_str(&format!("g :- {}.\n", self.goal.render()));
        out
    }

    /// Success probability by enumerating every assignment of values to
    /// call sites and summing the weights of the worlds where `g` holds.
    pub fn world_probability(&self) -> f64 {
        let mut sites = Vec::new();
        self.goal.site_switches(&mut sites);
        sites.sort_unstable();
        let switch_of: Vec<usize> = sites.iter().map(|&(_, s)| s).collect();
        let mut world = vec![0; switch_of.len()];
        let mut total = 0.0;
        loop {
            if self.goal.succeeds(&world) {
                total += world
                    .iter()
                    .zip(&switch_of)
                    .map(|(&v, &s)| self.switches[s][v])
                    .product::<f64>();
            }
            // Next world in odometer order.
            let mut i = 0;
            loop {
                if i == world.len() {
                    return total;
                }
                world[i] += 1;
                if world[i] < self.switches[switch_of[i]].len() {
                    break;
                }
                world[i] = 0;
                i += 1;
            }
        }
    }
}

struct PrismGen {
    rng: ChaCha8Rng,
    switches: usize,
    values: Vec<usize>,
    budget: usize,
    sites: usize,
}

impl PrismGen {
    fn leaf(&mut self) -> PrismNode {
        if self.rng.random_bool(0.75) {
            PrismNode::True
        } else {
            PrismNode::Fail
        }
    }

    fn node(&mut self, depth: usize) -> PrismNode {
        if self.budget == 0 || depth == 0 {
            return self.leaf();
        }
        match self.rng.random_range(0..20) {
            0..=10 => {
                self.budget -= 1;
                let site = self.sites;
                self.sites += 1;
                let switch = self.rng.random_range(0..self.switches);
                let cases = (0..self.values[switch])
                    .map(|_| self.rng.random_bool(0.8).then(|| self.node(depth - 1)))
                    .collect();
                PrismNode::Msw {
                    site,
                    switch,
                    cases,
                }
            }
            11..=14 => {
                let a = self.node(depth - 1);
                let b = self.node(depth - 1);
                PrismNode::And(Box::new(a), Box::new(b))
            }
            _ => self.leaf(),
        }
    }
}

/// A random exclusive PRISM program with at most `max_msw` call sites.
pub fn gen_prism(seed: u64, max_msw: usize) -> PrismProgram {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let switches = rng.random_range(1..=3);
    let values: Vec<usize> = (0..switches).map(|_| rng.random_range(2..=3)).collect();
    let probs = values
        .iter()
        .map(|&n| {
            let weights: Vec<f64> = (0..n)
                .map(|_| f64::from(rng.random_range(1..=9u8)))
                .collect();
            let sum: f64 = weights.iter().sum();
            weights.iter().map(|w| w / sum).collect()
        })
        .collect();
    let mut g = PrismGen {
        rng,
        switches,
        values,
        budget: max_msw,
        sites: 0,
    };
    let goal = g.node(4);
    PrismProgram {
        switches: probs,
        goal,
        sites: g.sites,
    }
}

// ---------------------------------------------------------------- BSP

/// A BSP tree of `xsplit/3`, `ysplit/3` and `leaf` over `points`, and a
/// query point.
#[derive(Debug, Clone, PartialEq)]
pub struct BspInstance {
    pub points: Vec<(f64, f64)>,
    pub target: (f64, f64),
    pub tree: String,
}

enum Bsp {
    Leaf,
    Split(bool, (f64, f64), Box<Bsp>, Box<Bsp>),
}

impl Bsp {
    /// Splits on x at even depths. Points left of (or above) the line go to
    /// the first subtree, points on the line to the second.
    fn insert(&mut self, p: (f64, f64), depth: usize) {
        match self {
            Bsp::Leaf => {
                *self = Bsp::Split(
                    depth.is_multiple_of(2),
                    p,
                    Box::new(Bsp::Leaf),
                    Box::new(Bsp::Leaf),
                )
            }
            Bsp::Split(on_x, s, first, second) => {
                let before = if *on_x { p.0 < s.0 } else { p.1 < s.1 };
                if before {
                    first.insert(p, depth + 1)
                } else {
                    second.insert(p, depth + 1)
                }
            }
        }
    }

    fn render(&self) -> String {
        match self {
            Bsp::Leaf => "leaf".to_string(),
            Bsp::Split(on_x, (x, y), a, b) => {
                let name = if *on_x { "xsplit" } else { "ysplit" };
                format!("{name}(({x:?},{y:?}),{},{})", a.render(), b.render())
            }
        }
    }
}

fn grid(rng: &mut ChaCha8Rng) -> f64 {
    f64::from(rng.random_range(-8..=8i8)) / 8.0
}

/// `n` random points on the 1/8 grid of `[-1,1]^2`, inserted in random
/// order, and a random target on the same grid.
pub fn gen_bsp(seed: u64, n: usize) -> BspInstance {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut points: Vec<(f64, f64)> = (0..n).map(|_| (grid(&mut rng), grid(&mut rng))).collect();
    points.shuffle(&mut rng);
    let mut tree = Bsp::Leaf;
    for &p in &points {
        tree.insert(p, 0);
    }
    let target = (grid(&mut rng), grid(&mut rng));
    BspInstance {
        points,
        target,
        tree: tree.render(),
    }
}

/// The point minimising `SquaredDistance-(X,Y)` in standard order: least
/// squared distance, then least x, then least y.
pub fn brute_force_nn(points: &[(f64, f64)], target: (f64, f64)) -> Option<(f64, (f64, f64))> {
    let key = |&(x, y): &(f64, f64)| {
        let d = (target.0 - x) * (target.0 - x) + (target.1 - y) * (target.1 - y);
        (d, (x, y))
    };
    points
        .iter()
        .map(key)
        .min_by(|a, b| a.partial_cmp(b).unwrap_or(Ordering::Equal))
}
