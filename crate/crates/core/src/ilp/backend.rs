//! Solvers for level models.
//!
//! Once the level-0 variables fix a center set `S`, every other variable is
//! forced: `v` sits at level `min(dist(v, S), cap(v))`. The builtin backend
//! therefore minimizes a facility-location style cost over `k`-subsets of
//! the centers with the shared set-enumeration search.

use std::fs;
use std::path::Path;
use std::process::{Command, Stdio};
use std::str::FromStr;
use std::time::{Duration, Instant};

use crate::error::{Error, Result};
use crate::exact::{set_enumeration_search, BbOptions, Status};
use crate::graph::VertexSet;
use crate::objective::{greedy_select, SetObjective};

use super::lp::{export_lp, import_solution};
use super::{Assignment, IlpModel};

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct BackendResult {
    pub objective: u64,
    pub assignment: Assignment,
    /// On timeout from an external solver the assignment is empty.
    pub status: Status,
}

pub trait Backend {
    fn name(&self) -> String;

    fn solve(&mut self, model: &IlpModel, deadline: Option<Instant>) -> Result<BackendResult>;
}

/// Backend selector as written on the command line: `builtin` or
/// `cmd:<template>`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum BackendChoice {
    Builtin,
    Command(String),
}

impl FromStr for BackendChoice {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        if s == "builtin" {
            Ok(BackendChoice::Builtin)
        } else if let Some(t) = s.strip_prefix("cmd:") {
            if t.trim().is_empty() {
                return Err(Error::InvalidParameter("empty command template".into()));
            }
            Ok(BackendChoice::Command(t.to_string()))
        } else {
            Err(Error::InvalidParameter(format!("unknown backend {s:?}")))
        }
    }
}

impl BackendChoice {
    pub fn instantiate(&self) -> Box<dyn Backend> {
        match self {
            BackendChoice::Builtin => Box::new(BuiltinBackend),
            BackendChoice::Command(t) => Box::new(ExternalBackend { template: t.clone() }),
        }
    }
}

/// Per-client cost of being served by a facility. A client not served by
/// any chosen facility pays its default cost.
pub(crate) struct CostTable {
    defaults: Vec<u64>,
    by_facility: Vec<Vec<(u32, u64)>>,
}

impl CostTable {
    pub(crate) fn new(defaults: Vec<u64>, by_facility: Vec<Vec<(u32, u64)>>) -> Self {
        CostTable { defaults, by_facility }
    }

    pub(crate) fn facilities(&self) -> usize {
        self.by_facility.len()
    }

    pub(crate) fn evaluate(&self, chosen: &[usize]) -> u64 {
        let mut state = self.empty_state();
        for &c in chosen {
            self.apply(&mut state, c);
        }
        self.value(&state)
    }

    fn apply(&self, state: &mut [u64], c: usize) {
        for &(u, cost) in &self.by_facility[c] {
            let cur = &mut state[u as usize];
            *cur = (*cur).min(cost);
        }
    }

    /// Exact minimum over `k`-subsets of facilities, seeded with greedy and
    /// swap improvement.
    pub(crate) fn minimize(&mut self, k: usize, deadline: Option<Instant>) -> (Vec<usize>, u64, Status) {
        let candidates: Vec<usize> = (0..self.facilities()).collect();
        let start = greedy_select(self, k, &candidates, true).chosen;
        let incumbent = self.swap_improve(start);
        let out = set_enumeration_search(self, k, &candidates, Some(incumbent), deadline, BbOptions::default(), None);
        let mut chosen = out.chosen.expect("incumbent is always present");
        chosen.sort_unstable();
        (chosen, out.value, out.status)
    }

    fn swap_improve(&self, mut chosen: Vec<usize>) -> (Vec<usize>, u64) {
        let mut value = self.evaluate(&chosen);
        'scan: loop {
            for pos in 0..chosen.len() {
                for o in 0..self.facilities() {
                    if chosen.contains(&o) {
                        continue;
                    }
                    let mut trial = chosen.clone();
                    trial[pos] = o;
                    let v = self.evaluate(&trial);
                    if v < value {
                        chosen = trial;
                        value = v;
                        continue 'scan;
                    }
                }
            }
            return (chosen, value);
        }
    }
}

impl SetObjective for CostTable {
    type State = Vec<u64>;

    fn empty_state(&self) -> Vec<u64> {
        self.defaults.clone()
    }

    fn value(&self, state: &Vec<u64>) -> u64 {
        state.iter().sum()
    }

    fn gain(&mut self, state: &Vec<u64>, c: usize) -> u64 {
        self.by_facility[c]
            .iter()
            .map(|&(u, cost)| state[u as usize].saturating_sub(cost))
            .sum()
    }

    fn insert(&mut self, state: &mut Vec<u64>, c: usize) {
        self.apply(state, c)
    }
}

/// Lowers a level model to its cost table. Facility `j` is the `j`-th
/// center in ascending order.
pub(crate) fn cost_table(model: &IlpModel) -> CostTable {
    let centers = model.centers.as_slice();
    let pos = |w: usize| centers.binary_search(&w).expect("supporter is a center");
    let mut by_facility = vec![Vec::new(); centers.len()];
    let mut defaults = Vec::with_capacity(model.rows.len());
    for (client, r) in model.rows.iter().enumerate() {
        let client = client as u32;
        defaults.push(r.coefficient(r.cap));
        if r.center && r.cap > 0 {
            by_facility[pos(r.vertex)].push((client, r.coefficient(0)));
        }
        for i in 1..r.cap {
            for &w in &r.supporters[i as usize] {
                by_facility[pos(w)].push((client, r.coefficient(i)));
            }
        }
    }
    CostTable::new(defaults, by_facility)
}

/// Exact solve of a level model by enumeration over center sets.
pub fn builtin_backend_solve(model: &IlpModel, time_limit: Option<Duration>) -> Result<BackendResult> {
    BuiltinBackend.solve(model, time_limit.map(|t| Instant::now() + t))
}

pub struct BuiltinBackend;

impl Backend for BuiltinBackend {
    fn name(&self) -> String {
        "builtin".into()
    }

    fn solve(&mut self, model: &IlpModel, deadline: Option<Instant>) -> Result<BackendResult> {
        if model.k == 0 || model.k > model.centers.len() {
            return Ok(BackendResult {
                objective: 0,
                assignment: Assignment::default(),
                status: Status::Infeasible,
            });
        }
        let mut table = cost_table(model);
        let (chosen, value, status) = table.minimize(model.k, deadline);
        let selected = VertexSet::new(chosen.into_iter().map(|j| model.centers.as_slice()[j]));
        let (assignment, objective) = model.assignment_for(&selected);
        debug_assert_eq!(objective, value);
        Ok(BackendResult {
            objective,
            assignment,
            status,
        })
    }
}

/// Runs an external MIP solver through LP-file exchange. The template is
/// run by `sh -c` after substituting `{lp}` and `{sol}` with quoted paths.
pub struct ExternalBackend {
    pub template: String,
}

const POLL: Duration = Duration::from_millis(5);

fn shell_quote(p: &Path) -> String {
    format!("'{}'", p.display().to_string().replace('\'', r"'\''"))
}

impl Backend for ExternalBackend {
    fn name(&self) -> String {
        format!("cmd:{}", self.template)
    }

    fn solve(&mut self, model: &IlpModel, deadline: Option<Instant>) -> Result<BackendResult> {
        let dir = tempfile::tempdir()?;
        let lp = dir.path().join("model.lp");
        let sol = dir.path().join("model.sol");
        let err = dir.path().join("stderr.txt");
        fs::write(&lp, export_lp(model))?;
        let cmd = self
            .template
            .replace("{lp}", &shell_quote(&lp))
            .replace("{sol}", &shell_quote(&sol));
        let mut child = Command::new("sh")
            .arg("-c")
            .arg(&cmd)
            .stdin(Stdio::null())
            .stdout(Stdio::null())
            .stderr(fs::File::create(&err)?)
            .spawn()?;
        let status = loop {
            if let Some(status) = child.try_wait()? {
                break status;
            }
            if deadline.is_some_and(|d| Instant::now() >= d) {
                let _ = child.kill();
                let _ = child.wait();
                return Ok(BackendResult {
                    objective: 0,
                    assignment: Assignment::default(),
                    status: Status::Timeout,
                });
            }
            std::thread::sleep(POLL);
        };
        if !status.success() {
            let stderr = fs::read_to_string(&err).unwrap_or_default();
            let lines: Vec<&str> = stderr.lines().collect();
            let tail = lines[lines.len().saturating_sub(5)..].join("\n");
            return Err(Error::Backend(format!("command exited with {status}: {tail}")));
        }
        let text = fs::read_to_string(&sol)
            .map_err(|e| Error::Backend(format!("cannot read solution file: {e}")))?;
        import_solution(&text, model)
    }
}
