use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

/// Size bounds for [`gen_program`].
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct GenParams {
    pub max_preds: usize,
    pub max_arity: usize,
    pub max_clauses: usize,
    /// Nesting depth of `,` and `;` in clause bodies.
    pub max_body_depth: usize,
    /// Also emit `( C -> T ; E )` in bodies.
    pub if_then_else: bool,
}

impl Default for GenParams {
    fn default() -> Self {
        GenParams {
            max_preds: 6,
            max_arity: 2,
            max_clauses: 4,
            max_body_depth: 2,
            if_then_else: false,
        }
    }
}

/// A generated program and query, both as source text.
#[derive(Debug, Clone, PartialEq)]
pub struct Generated {
    pub program: String,
    pub query: String,
}

const ATOMS: &[&str] = &["a", "b", "c"];
const CLAUSE_VARS: &[&str] = &["A", "B", "C"];

struct Gen<'p> {
    rng: ChaCha8Rng,
    params: &'p GenParams,
    arities: Vec<usize>,
}

impl Gen<'_> {
    fn constant(&mut self) -> String {
        if self.rng.random_bool(0.7) {
            ATOMS[self.rng.random_range(0..ATOMS.len())].to_string()
        } else {
            self.rng.random_range(0..3).to_string()
        }
    }

    /// Compound arguments hold only constants and anonymous variables, so
    /// no binding can ever close a cycle.
    fn compound(&mut self, depth: usize) -> String {
        let arity = self.rng.random_range(1..=2);
        let args: Vec<String> = (0..arity)
            .map(|_| match self.rng.random_range(0..4) {
                0 if depth > 0 => self.compound(depth - 1),
                1 => "_".to_string(),
                _ => self.constant(),
            })
            .collect();
        let name = if arity == 1 { "f" } else { "g" };
        format!("{name}({})", args.join(", "))
    }

    fn arg(&mut self, vars: &[&str]) -> String {
        match self.rng.random_range(0..10) {
            0..=4 => vars[self.rng.random_range(0..vars.len())].to_string(),
            5..=7 => self.constant(),
            _ => self.compound(1),
        }
    }

    fn call(&mut self, pred: usize, vars: &[&str]) -> String {
        let arity = self.arities[pred];
        if arity == 0 {
            return format!("p{pred}");
        }
        let args: Vec<String> = (0..arity).map(|_| self.arg(vars)).collect();
        format!("p{pred}({})", args.join(", "))
    }

    /// A literal of the body of a clause of `p{owner}`; calls go only to
    /// higher-numbered predicates.
    fn literal(&mut self, owner: usize) -> String {
        let callees = owner + 1..self.arities.len();
        match self.rng.random_range(0..10) {
            0..=4 if !callees.is_empty() => {
                let p = self.rng.random_range(callees);
                self.call(p, CLAUSE_VARS)
            }
            0..=6 => format!("{} = {}", self.arg(CLAUSE_VARS), self.arg(CLAUSE_VARS)),
            7 | 8 => "true".to_string(),
            _ => "fail".to_string(),
        }
    }

    fn body(&mut self, owner: usize, depth: usize) -> String {
        if depth == 0 || self.rng.random_bool(0.35) {
            return self.literal(owner);
        }
        let a = self.body(owner, depth - 1);
        let b = self.body(owner, depth - 1);
        match self.rng.random_range(0..10) {
            0..=4 => format!("{a}, {b}"),
            5..=8 => format!("({a} ; {b})"),
            _ if self.params.if_then_else => {
                let c = self.body(owner, depth - 1);
                format!("({c} -> {a} ; {b})")
            }
            _ => format!("({a} ; {b})"),
        }
    }

    fn clause(&mut self, pred: usize) -> String {
        let head = self.call(pred, CLAUSE_VARS);
        if self.rng.random_bool(0.3) {
            return format!("{head}.");
        }
        let body = self.body(pred, self.params.max_body_depth);
        format!("{head} :- {body}.")
    }
}

/// A random definite program over predicates `p0, p1, ...` and a query on
/// `p0`. Clauses of `pI` only call `pJ` with `J > I`, so every derivation
/// is finite. The same seed always yields the same program.
pub fn gen_program(seed: u64, params: &GenParams) -> Generated {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let n = rng.random_range(1..=params.max_preds.max(1));
    let arities = (0..n)
        .map(|_| rng.random_range(0..=params.max_arity))
        .collect();
    let mut g = Gen {
        rng,
        params,
        arities,
    };
    let mut lines = Vec::new();
    for pred in 0..n {
        let count = if pred > 0 && g.rng.random_bool(0.1) {
            0
        } else {
            g.rng.random_range(1..=params.max_clauses.max(1))
        };
        for _ in 0..count {
            let clause = g.clause(pred);
            lines.push(clause);
        }
    }
    let query = g.call(0, &["X", "Y"]);
    let mut program = lines.join("\n");
    program.push('\n');
    Generated { program, query }
}
