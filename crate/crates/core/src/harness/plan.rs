//! Query plans: one query list answered by several decision procedures.

use std::collections::BTreeSet;

use rayon::prelude::*;

use super::{relational_work, state_work, within_budget, Findings, LimitExceeded, Observation};
use crate::consequence::{Entry, Profile, ProfileTable, SearchBound, Verdict};
use crate::domain::informational_table;
use crate::frameprops::FrameClass;
use crate::syntax::Formula;
use crate::update::update_table;

#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct Query {
    pub premises: Vec<Formula>,
    pub conclusion: Formula,
}

impl Query {
    pub fn new(premises: Vec<Formula>, conclusion: Formula) -> Query {
        Query { premises, conclusion }
    }

    pub fn render(&self) -> String {
        let prem: Vec<String> = self.premises.iter().map(|f| f.to_string()).collect();
        format!("{{{}}} / {}", prem.join(", "), self.conclusion)
    }
}

/// The consequence relation a side decides. `None` means the class of the current run.
#[derive(Debug, Clone, PartialEq)]
pub enum Sem {
    Global(Option<FrameClass>),
    Local(Option<FrameClass>),
    Informational,
    Update,
}

type Translate = Box<dyn Fn(&Query) -> (Vec<Formula>, Formula) + Send + Sync>;

struct Side {
    label: String,
    sem: Sem,
    formulas: Vec<Formula>,
    ids: Vec<(Profile, usize)>,
    translate: Translate,
}

/// Every query is translated and interned once per side, so a run only builds tables.
pub struct Plan {
    queries: Vec<Query>,
    sides: Vec<Side>,
}

pub struct Built<'a> {
    plan: &'a Plan,
    tables: Vec<ProfileTable>,
}

impl Plan {
    pub fn new(queries: Vec<Query>) -> Plan {
        Plan { queries, sides: Vec::new() }
    }

    pub fn side(
        mut self,
        label: impl Into<String>,
        sem: Sem,
        translate: impl Fn(&Query) -> (Vec<Formula>, Formula) + Send + Sync + 'static,
    ) -> Plan {
        let mut formulas: Vec<Formula> = Vec::new();
        let mut index = std::collections::HashMap::new();
        let mut intern = |f: Formula| -> usize {
            *index.entry(f.clone()).or_insert_with(|| {
                formulas.push(f);
                formulas.len() - 1
            })
        };
        let ids = self
            .queries
            .iter()
            .map(|q| {
                let (prem, concl) = translate(q);
                let p = Profile::of(prem.into_iter().map(&mut intern).collect::<Vec<_>>());
                (p, intern(concl))
            })
            .collect();
        self.sides.push(Side {
            label: label.into(),
            sem,
            formulas,
            ids,
            translate: Box::new(translate),
        });
        self
    }

    pub fn queries(&self) -> &[Query] {
        &self.queries
    }

    fn class_of<'c>(sem: &'c Sem, current: Option<&'c FrameClass>) -> Option<&'c FrameClass> {
        match sem {
            Sem::Global(c) | Sem::Local(c) => c.as_ref().or(current),
            _ => None,
        }
    }

    pub fn estimate(&self, current: Option<&FrameClass>, n: usize) -> u64 {
        self.sides
            .iter()
            .map(|s| {
                let mut atoms = BTreeSet::new();
                for f in &s.formulas {
                    f.collect_atoms(&mut atoms);
                }
                match Plan::class_of(&s.sem, current) {
                    Some(c) => relational_work(c, n, atoms.len(), s.formulas.len()),
                    None => state_work(n, atoms.len(), s.formulas.len()),
                }
            })
            .fold(0, u64::saturating_add)
    }

    /// Builds one table per side within `n` worlds.
    pub fn build(&self, current: Option<&FrameClass>, n: usize) -> Result<Built<'_>, LimitExceeded> {
        within_budget(self.estimate(current, n))?;
        let b = SearchBound::new(n);
        let tables = self
            .sides
            .iter()
            .map(|s| {
                let fs = s.formulas.iter().cloned();
                let built = match &s.sem {
                    Sem::Global(_) => ProfileTable::global(
                        Plan::class_of(&s.sem, current).expect("relational side needs a class"),
                        &b,
                        fs,
                    )
                    .map_err(|e| e.to_string()),
                    Sem::Local(_) => ProfileTable::local(
                        Plan::class_of(&s.sem, current).expect("relational side needs a class"),
                        &b,
                        fs,
                    )
                    .map_err(|e| e.to_string()),
                    Sem::Informational => informational_table(&b, fs).map_err(|e| e.to_string()),
                    Sem::Update => update_table(&b, fs).map_err(|e| e.to_string()),
                };
                built.map_err(|_| LimitExceeded { estimate: u64::MAX })
            })
            .collect::<Result<Vec<_>, _>>()?;
        Ok(Built { plan: self, tables })
    }

    /// Counts every query and records those whose outcomes fail `ok`.
    pub fn run(
        &self,
        current: Option<&FrameClass>,
        n: usize,
        findings: &mut Findings,
        class_label: &str,
        expected: bool,
        ok: impl Fn(&Query, &[bool]) -> bool + Sync,
    ) -> Result<(), LimitExceeded> {
        let built = self.build(current, n)?;
        let bad: Vec<usize> = (0..self.queries.len())
            .into_par_iter()
            .filter(|&qi| !ok(&self.queries[qi], &built.outcomes(qi)))
            .collect();
        findings.queries(self.queries.len() as u64);
        for qi in bad {
            let verdicts = built.observations(qi);
            let query = self.queries[qi].render();
            if expected {
                findings.record_expected(class_label, query, verdicts);
            } else {
                findings.record(class_label, query, verdicts);
            }
        }
        Ok(())
    }
}

impl Built<'_> {
    pub fn holds(&self, side: usize, qi: usize) -> bool {
        self.refutation(side, qi).is_none()
    }

    pub fn refutation(&self, side: usize, qi: usize) -> Option<&Entry> {
        let (p, c) = &self.plan.sides[side].ids[qi];
        self.tables[side].refute(p, *c)
    }

    pub fn outcomes(&self, qi: usize) -> Vec<bool> {
        (0..self.tables.len()).map(|s| self.holds(s, qi)).collect()
    }

    pub fn verdict(&self, side: usize, qi: usize) -> Verdict {
        let s = &self.plan.sides[side];
        let (prem, concl) = (s.translate)(&self.plan.queries[qi]);
        self.tables[side]
            .verdict(&prem, &concl)
            .expect("translated formulas are interned")
    }

    pub fn observations(&self, qi: usize) -> Vec<Observation> {
        (0..self.tables.len())
            .map(|s| Observation::of(self.plan.sides[s].label.clone(), &self.verdict(s, qi)))
            .collect()
    }
}

/// The query unchanged.
pub fn same(q: &Query) -> (Vec<Formula>, Formula) {
    (q.premises.clone(), q.conclusion.clone())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::syntax::parse;

    fn f(s: &str) -> Formula {
        parse(s).unwrap()
    }

    #[test]
    fn plan_records_disagreements() {
        let queries = vec![
            Query::new(vec![f("p")], f("[]p")),
            Query::new(vec![], f("p | ~p")),
        ];
        let plan = Plan::new(queries)
            .side("global", Sem::Global(None), same)
            .side("local", Sem::Local(None), same);
        let mut found = Findings::default();
        plan.run(Some(&FrameClass::K), 2, &mut found, "K", false, |_, o| o[0] == o[1])
            .unwrap();
        assert_eq!(found.queries, 2);
        assert_eq!(found.unexpected, 1);
        let d = &found.listed[0];
        assert_eq!(d.query, "{p} / []p");
        assert_eq!(d.verdicts[0].outcome, "holds");
        assert_eq!(d.verdicts[1].outcome, "refuted");
        assert!(d.verdicts[1].witness.is_some());
    }
}
