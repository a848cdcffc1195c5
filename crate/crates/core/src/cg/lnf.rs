//! Semantic relations between labels and gotos, and label normal form.

use std::collections::BTreeSet;

use super::{CgInSeq, CgInstr, GotoMode};
use crate::machine::Machine;

/// Relations over the label/goto positions of a sequence.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct LabelRelations {
    pub labels: BTreeSet<i64>,
    pub gotos: BTreeSet<i64>,
    /// Same label number and direction.
    pub corr: BTreeSet<(i64, i64)>,
    /// Goto at the first position transfers to the label at the second.
    pub gacc: BTreeSet<(i64, i64)>,
    /// Identical gotos with a common target.
    pub te: BTreeSet<(i64, i64)>,
    /// `te ∪ gacc ∪ gacc⁻¹ ∪ id(labels)`.
    pub lgr: BTreeSet<(i64, i64)>,
    /// Classes of `lgr`, each sorted, ordered by least member.
    pub classes: Vec<Vec<i64>>,
}

impl LabelRelations {
    pub fn of(x: &CgInSeq) -> Self {
        let lg: Vec<(i64, &CgInstr)> = x
            .instrs()
            .iter()
            .enumerate()
            .filter(|(_, u)| u.number().is_some())
            .map(|(p, u)| (p as i64 + 1, u))
            .collect();
        let labels: BTreeSet<i64> =
            lg.iter().filter(|(_, u)| matches!(u, CgInstr::Label(..))).map(|(p, _)| *p).collect();
        let gotos: BTreeSet<i64> =
            lg.iter().filter(|(_, u)| matches!(u, CgInstr::Goto(..))).map(|(p, _)| *p).collect();
        let m = x.with_mode(GotoMode::Directional);
        let target = |p: i64| -> i64 { m.successors(p)[0] };
        let targets: Vec<(i64, i64)> = gotos.iter().map(|&g| (g, target(g))).collect();

        let mut corr = BTreeSet::new();
        for &(i, u) in &lg {
            for &(j, v) in &lg {
                if u.dir() == v.dir() && u.number() == v.number() {
                    corr.insert((i, j));
                }
            }
        }
        let gacc: BTreeSet<(i64, i64)> =
            targets.iter().filter(|(_, t)| labels.contains(t)).copied().collect();
        let mut te = BTreeSet::new();
        for &(i, ti) in &targets {
            for &(j, tj) in &targets {
                if ti == tj && x.inst(i) == x.inst(j) {
                    te.insert((i, j));
                }
            }
        }
        let mut lgr: BTreeSet<(i64, i64)> = te.clone();
        lgr.extend(gacc.iter().copied());
        lgr.extend(gacc.iter().map(|&(g, l)| (l, g)));
        lgr.extend(labels.iter().map(|&l| (l, l)));

        let mut classes: Vec<Vec<i64>> = Vec::new();
        let mut assigned = BTreeSet::new();
        for &(p, _) in &lg {
            if assigned.contains(&p) {
                continue;
            }
            let class: Vec<i64> =
                lg.iter().map(|(q, _)| *q).filter(|&q| lgr.contains(&(p, q))).collect();
            assigned.extend(class.iter().copied());
            classes.push(class);
        }
        LabelRelations { labels, gotos, corr, gacc, te, lgr, classes }
    }

    pub fn is_lnf(&self) -> bool {
        self.corr.is_subset(&self.lgr)
    }

    /// Every goto corresponding to a label targets it.
    pub fn gotos_target_corresponding_labels(&self) -> bool {
        self.corr
            .iter()
            .filter(|(i, j)| self.gotos.contains(i) && self.labels.contains(j))
            .all(|p| self.gacc.contains(p))
    }

    /// No two positions hold the same label.
    pub fn labels_distinct(&self, x: &CgInSeq) -> bool {
        self.labels
            .iter()
            .all(|&i| self.labels.iter().all(|&j| i == j || x.inst(i) != x.inst(j)))
    }

    /// Identical gotos are target equivalent.
    pub fn identical_gotos_target_equivalent(&self, x: &CgInSeq) -> bool {
        self.gotos.iter().all(|&i| {
            self.gotos.iter().all(|&j| x.inst(i) != x.inst(j) || self.te.contains(&(i, j)))
        })
    }
}

impl CgInSeq {
    pub fn label_relations(&self) -> LabelRelations {
        LabelRelations::of(self)
    }

    pub fn is_lnf(&self) -> bool {
        self.label_relations().is_lnf()
    }

    /// Renumbers each `lgr` class `1..=n` in order of least member.
    pub fn to_lnf(&self) -> CgInSeq {
        let rel = self.label_relations();
        let mut number = std::collections::HashMap::new();
        for (c, class) in rel.classes.iter().enumerate() {
            for &p in class {
                number.insert(p as usize, c + 1);
            }
        }
        self.relabel(|p, _| number[&p])
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn cg(s: &str) -> CgInSeq {
        s.parse().unwrap()
    }

    #[test]
    fn identical_labels_example() {
        let x = cg("/G7;/a;/L7;/b;/G7;/c;/L7");
        assert!(!x.is_lnf());
        let y = x.to_lnf();
        assert_eq!(y, cg("/G1;/a;/L1;/b;/G2;/c;/L2"));
        assert!(y.is_lnf());
        for i in 0..=8 {
            assert!(x.behavior_at(i).bisimilar(&y.behavior_at(i)));
        }
    }

    #[test]
    fn single_class() {
        let x = cg("/G0;/L0");
        let r = x.label_relations();
        assert!(r.is_lnf());
        assert_eq!(r.classes, vec![vec![1, 2]]);
    }

    #[test]
    fn orphans_are_target_equivalent() {
        let x = cg("/G3;/a;/G3");
        let r = x.label_relations();
        assert!(r.te.contains(&(1, 3)));
        assert!(r.is_lnf());
        assert!(r.identical_gotos_target_equivalent(&x));
    }

    #[test]
    fn consequences_hold_after_normalization() {
        let x = cg("/L2;/G2;/L2;\\G2;\\L2;/G2;!").to_lnf();
        let r = x.label_relations();
        assert!(r.is_lnf());
        assert!(r.gotos_target_corresponding_labels());
        assert!(r.labels_distinct(&x));
        assert!(r.identical_gotos_target_equivalent(&x));
        assert_eq!(x.to_lnf(), x);
    }
}
