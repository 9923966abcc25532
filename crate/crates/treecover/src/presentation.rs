//! Finitely presented groups: free words, Tietze simplification and a
//! small coset enumerator. This backs the scale presentations of the
//! epsilon machinery; it decides the word problem exactly whenever the
//! simplified presentation is free or the enumeration closes, and says
//! so honestly otherwise.

use std::collections::VecDeque;

/// A letter of a free word: generator index plus inversion flag.
pub type Letter = (usize, bool);
/// A word over free generators, always manipulated in reduced form.
pub type Word = Vec<Letter>;

pub fn free_reduce(word: &[Letter]) -> Word {
    let mut out: Word = Vec::with_capacity(word.len());
    for &l in word {
        match out.last() {
            Some(&last) if last.0 == l.0 && last.1 != l.1 => {
                out.pop();
            }
            _ => out.push(l),
        }
    }
    out
}

pub fn invert_word(word: &[Letter]) -> Word {
    word.iter().rev().map(|&(g, inv)| (g, !inv)).collect()
}

pub fn concat_reduced(a: &[Letter], b: &[Letter]) -> Word {
    let mut w = a.to_vec();
    w.extend_from_slice(b);
    free_reduce(&w)
}

/// Conjugates away matching first/last letters after free reduction.
pub fn cyclic_reduce(word: &[Letter]) -> Word {
    let mut w = free_reduce(word);
    while w.len() >= 2 {
        let first = w[0];
        let last = *w.last().unwrap();
        if first.0 == last.0 && first.1 != last.1 {
            w.pop();
            w.remove(0);
        } else {
            break;
        }
    }
    w
}

/// A finite presentation: `rank` generators and a list of relator words.
#[derive(Debug, Clone)]
pub struct Presentation {
    pub rank: usize,
    pub relations: Vec<Word>,
}

/// What the simplification pass concluded about the presented group.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum GroupKind {
    /// Free on the surviving generators (no relations remain).
    Free { rank: usize },
    /// The coset enumeration closed; the group is finite of this order.
    Finite { order: usize },
    /// Relations remain and the enumeration did not close in budget.
    Unknown,
}

/// Result of simplifying a presentation. Eliminated generators carry an
/// expression over the survivors so that arbitrary words in the original
/// generators can be rewritten into the simplified group.
#[derive(Debug, Clone)]
pub struct Simplified {
    /// Original indices of the surviving generators, ascending.
    pub survivors: Vec<usize>,
    /// Relations over survivor positions (indices into `survivors`).
    pub relations: Vec<Word>,
    pub kind: GroupKind,
    /// For each original generator: `None` if it survives, otherwise its
    /// expression as a word over survivor positions.
    expressions: Vec<Option<Word>>,
    /// Original index -> survivor position, for survivors.
    position: Vec<Option<usize>>,
    table: Option<CosetTable>,
}

impl Simplified {
    /// Rewrites a word over the original generators into survivor
    /// positions, freely reduced.
    pub fn rewrite(&self, word: &[Letter]) -> Word {
        let mut out: Word = Vec::new();
        for &(g, inv) in word {
            match &self.expressions[g] {
                None => out.push((self.position[g].expect("survivor has a position"), inv)),
                Some(expr) => {
                    if inv {
                        out.extend(invert_word(expr));
                    } else {
                        out.extend_from_slice(expr);
                    }
                }
            }
        }
        free_reduce(&out)
    }

    /// Whether a word over the original generators is the identity.
    /// `None` when the group kind is unknown.
    pub fn is_identity(&self, word: &[Letter]) -> Option<bool> {
        let w = self.rewrite(word);
        match &self.kind {
            GroupKind::Free { .. } => Some(w.is_empty()),
            GroupKind::Finite { .. } => {
                let table = self.table.as_ref().expect("finite kind keeps its table");
                Some(table.trace(0, &w) == Some(0))
            }
            GroupKind::Unknown => None,
        }
    }

    pub fn free_rank(&self) -> Option<usize> {
        match self.kind {
            GroupKind::Free { rank } => Some(rank),
            // The trivial group is free of rank 0.
            GroupKind::Finite { order: 1 } => Some(0),
            _ => None,
        }
    }
}

/// Default coset budget for the enumeration fallback.
pub const DEFAULT_COSET_BUDGET: usize = 50_000;

/// Simplifies by repeated Tietze eliminations: freely and cyclically
/// reduce relators, drop empties, and eliminate any generator occurring
/// exactly once in some relator (shortest relator first). If relations
/// remain, falls back to coset enumeration over the trivial subgroup.
pub fn simplify(p: &Presentation, coset_budget: usize) -> Simplified {
    let rank = p.rank;
    let mut alive: Vec<bool> = vec![true; rank];
    // Expressions over *original* indices, only referencing generators
    // alive at the time of elimination; resolved transitively later.
    let mut raw_expr: Vec<Option<Word>> = vec![None; rank];
    let mut relations: Vec<Word> = p
        .relations
        .iter()
        .map(|r| cyclic_reduce(r))
        .filter(|r| !r.is_empty())
        .collect();

    const LETTER_CAP: usize = 200_000;
    loop {
        relations.sort();
        relations.dedup();
        relations.retain(|r| !r.is_empty());
        // Pick the shortest relator containing a generator that occurs in
        // it exactly once.
        let mut choice: Option<(usize, usize)> = None; // (relation idx, letter pos)
        let mut order: Vec<usize> = (0..relations.len()).collect();
        order.sort_by_key(|&i| (relations[i].len(), i));
        'search: for &ri in &order {
            let r = &relations[ri];
            for (pos, &(g, _)) in r.iter().enumerate() {
                let occurrences = r.iter().filter(|&&(h, _)| h == g).count();
                if occurrences == 1 {
                    choice = Some((ri, pos));
                    break 'search;
                }
            }
        }
        let Some((ri, pos)) = choice else { break };
        let r = relations.swap_remove(ri);
        let (g, inv) = r[pos];
        // r = u g^e v = 1  =>  g = u^-1 v^-1 (e = 1)  or  g = v u (e = -1).
        let u = &r[..pos];
        let v = &r[pos + 1..];
        let expr = if !inv {
            concat_reduced(&invert_word(u), &invert_word(v))
        } else {
            concat_reduced(v, u)
        };
        alive[g] = false;
        raw_expr[g] = Some(expr.clone());
        let mut total = 0usize;
        for rel in &mut relations {
            let mut out: Word = Vec::with_capacity(rel.len());
            for &(h, hinv) in rel.iter() {
                if h == g {
                    if hinv {
                        out.extend(invert_word(&expr));
                    } else {
                        out.extend_from_slice(&expr);
                    }
                } else {
                    out.push((h, hinv));
                }
            }
            *rel = cyclic_reduce(&out);
            total += rel.len();
        }
        if total > LETTER_CAP {
            break; // runaway growth; leave the rest to the enumerator
        }
    }

    let survivors: Vec<usize> = (0..rank).filter(|&i| alive[i]).collect();
    let mut position: Vec<Option<usize>> = vec![None; rank];
    for (slot, &orig) in survivors.iter().enumerate() {
        position[orig] = Some(slot);
    }
    // Resolve eliminated generators down to survivor positions. The
    // elimination order is acyclic, so memoized expansion terminates.
    let mut expressions: Vec<Option<Word>> = vec![None; rank];
    fn resolve(
        i: usize,
        raw_expr: &[Option<Word>],
        position: &[Option<usize>],
        memo: &mut Vec<Option<Word>>,
        depth: usize,
    ) -> Word {
        assert!(depth <= raw_expr.len(), "elimination order is acyclic");
        if let Some(slot) = position[i] {
            return vec![(slot, false)];
        }
        if let Some(done) = &memo[i] {
            return done.clone();
        }
        let mut out: Word = Vec::new();
        for &(g, inv) in raw_expr[i].as_ref().expect("eliminated generators have expressions") {
            let sub = resolve(g, raw_expr, position, memo, depth + 1);
            if inv {
                out.extend(invert_word(&sub));
            } else {
                out.extend_from_slice(&sub);
            }
        }
        let out = free_reduce(&out);
        memo[i] = Some(out.clone());
        out
    }
    let mut memo: Vec<Option<Word>> = vec![None; rank];
    for i in 0..rank {
        if !alive[i] {
            expressions[i] = Some(resolve(i, &raw_expr, &position, &mut memo, 0));
        }
    }

    let relations: Vec<Word> = relations
        .iter()
        .map(|r| {
            free_reduce(
                &r.iter()
                    .map(|&(g, inv)| (position[g].expect("relations reference survivors"), inv))
                    .collect::<Vec<_>>(),
            )
        })
        .filter(|r| !r.is_empty())
        .collect();

    let (kind, table) = if relations.is_empty() {
        (
            GroupKind::Free {
                rank: survivors.len(),
            },
            None,
        )
    } else {
        match CosetTable::enumerate(survivors.len(), &relations, coset_budget) {
            Some(table) => (
                GroupKind::Finite {
                    order: table.coset_count(),
                },
                Some(table),
            ),
            None => (GroupKind::Unknown, None),
        }
    };

    Simplified {
        survivors,
        relations,
        kind,
        expressions,
        position,
        table,
    }
}

/// A completed coset table for the trivial subgroup: the regular action
/// of a finite group on itself.
#[derive(Debug, Clone)]
pub struct CosetTable {
    /// `table[coset][2g + inv]` = image coset.
    table: Vec<Vec<usize>>,
}

impl CosetTable {
    pub fn coset_count(&self) -> usize {
        self.table.len()
    }

    /// Follows `word` from `start`; `None` only if the word references
    /// generators outside the table.
    pub fn trace(&self, start: usize, word: &[Letter]) -> Option<usize> {
        let mut at = start;
        for &(g, inv) in word {
            let col = 2 * g + usize::from(inv);
            at = *self.table.get(at)?.get(col)?;
        }
        Some(at)
    }

    /// HLT-style enumeration of the cosets of the trivial subgroup.
    /// Returns `None` if more than `budget` cosets get defined.
    pub fn enumerate(rank: usize, relations: &[Word], budget: usize) -> Option<CosetTable> {
        if rank == 0 {
            return Some(CosetTable {
                table: vec![Vec::new()],
            });
        }
        let cols = 2 * rank;
        let col = |(g, inv): Letter| 2 * g + usize::from(inv);
        let inv_col = |c: usize| c ^ 1;

        let mut table: Vec<Vec<Option<usize>>> = vec![vec![None; cols]];
        let mut parent: Vec<usize> = vec![0];

        fn find(parent: &mut [usize], mut x: usize) -> usize {
            while parent[x] != x {
                parent[x] = parent[parent[x]];
                x = parent[x];
            }
            x
        }

        let mut pending: VecDeque<(usize, usize)> = VecDeque::new();

        // Merges two cosets and propagates coincidences.
        fn coincide(
            table: &mut [Vec<Option<usize>>],
            parent: &mut [usize],
            pending: &mut VecDeque<(usize, usize)>,
            a: usize,
            b: usize,
            cols: usize,
        ) {
            pending.push_back((a, b));
            while let Some((a, b)) = pending.pop_front() {
                let ra = find(parent, a);
                let rb = find(parent, b);
                if ra == rb {
                    continue;
                }
                let (keep, drop) = if ra < rb { (ra, rb) } else { (rb, ra) };
                parent[drop] = keep;
                for c in 0..cols {
                    if let Some(t) = table[drop][c] {
                        let t = find(parent, t);
                        match table[keep][c] {
                            None => {
                                table[keep][c] = Some(t);
                                // Keep the inverse entry consistent.
                                if table[t][c ^ 1].is_none() {
                                    table[t][c ^ 1] = Some(keep);
                                }
                            }
                            Some(existing) => {
                                let existing = find(parent, existing);
                                if existing != t {
                                    pending.push_back((existing, t));
                                }
                            }
                        }
                    }
                }
            }
        }

        let mut scan_from = 0usize;
        loop {
            // Find the next live coset at or after scan_from.
            let mut current = None;
            for i in scan_from..table.len() {
                if find(&mut parent, i) == i {
                    current = Some(i);
                    break;
                }
            }
            let Some(c) = current else { break };
            scan_from = c + 1;

            // Scan and fill every relator at c, then fill missing columns.
            for rel in relations {
                if find(&mut parent, c) != c {
                    break;
                }
                let mut at = c;
                for (idx, &l) in rel.iter().enumerate() {
                    let at_r = find(&mut parent, at);
                    let cc = col(l);
                    let next = table[at_r][cc].map(|t| find(&mut parent, t));
                    match next {
                        Some(t) => at = t,
                        None => {
                            if idx + 1 == rel.len() {
                                // Last letter must close back to c.
                                let target = find(&mut parent, c);
                                table[at_r][cc] = Some(target);
                                if table[target][inv_col(cc)].is_none() {
                                    table[target][inv_col(cc)] = Some(at_r);
                                } else {
                                    let ex = table[target][inv_col(cc)].unwrap();
                                    coincide(&mut table, &mut parent, &mut pending, ex, at_r, cols);
                                }
                                at = target;
                            } else {
                                if table.len() >= budget {
                                    return None;
                                }
                                let fresh = table.len();
                                table.push(vec![None; cols]);
                                parent.push(fresh);
                                table[at_r][cc] = Some(fresh);
                                table[fresh][inv_col(cc)] = Some(at_r);
                                at = fresh;
                            }
                        }
                    }
                }
                // The relator must fix c.
                let at = find(&mut parent, at);
                let c_now = find(&mut parent, c);
                if at != c_now {
                    coincide(&mut table, &mut parent, &mut pending, at, c_now, cols);
                }
            }
            if find(&mut parent, c) != c {
                continue;
            }
            for cc in 0..cols {
                let c_now = find(&mut parent, c);
                if c_now != c {
                    break;
                }
                if table[c][cc].is_none() {
                    if table.len() >= budget {
                        return None;
                    }
                    let fresh = table.len();
                    table.push(vec![None; cols]);
                    parent.push(fresh);
                    table[c][cc] = Some(fresh);
                    table[fresh][inv_col(cc)] = Some(c);
                }
            }
        }

        // Compact to live cosets.
        let mut live: Vec<usize> = Vec::new();
        let mut slot: Vec<Option<usize>> = vec![None; table.len()];
        for i in 0..table.len() {
            if find(&mut parent, i) == i {
                slot[i] = Some(live.len());
                live.push(i);
            }
        }
        let compact: Vec<Vec<usize>> = live
            .iter()
            .map(|&i| {
                (0..cols)
                    .map(|c| {
                        let t = table[i][c].expect("completed table has no gaps");
                        slot[find(&mut parent, t)].expect("live target")
                    })
                    .collect()
            })
            .collect();
        Some(CosetTable { table: compact })
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn w(letters: &[(usize, bool)]) -> Word {
        letters.to_vec()
    }

    #[test]
    fn free_reduction_basics() {
        let a = (0, false);
        let a_inv = (0, true);
        let b = (1, false);
        assert_eq!(free_reduce(&[a, a_inv]), vec![]);
        assert_eq!(free_reduce(&[a, b, (1, true), a_inv]), vec![]);
        assert_eq!(free_reduce(&[a, b, a_inv]), vec![a, b, a_inv]);
        assert_eq!(cyclic_reduce(&[a, b, a_inv]), vec![b]);
        assert_eq!(
            concat_reduced(&[a, b], &[(1, true), a]),
            vec![a, a]
        );
    }

    #[test]
    fn simplify_free_presentation() {
        let p = Presentation {
            rank: 3,
            relations: vec![],
        };
        let s = simplify(&p, 100);
        assert_eq!(s.kind, GroupKind::Free { rank: 3 });
        assert_eq!(s.free_rank(), Some(3));
    }

    #[test]
    fn simplify_kills_singly_occurring_generators() {
        // <a, b, c | a, b c> is infinite cyclic.
        let p = Presentation {
            rank: 3,
            relations: vec![w(&[(0, false)]), w(&[(1, false), (2, false)])],
        };
        let s = simplify(&p, 100);
        assert_eq!(s.kind, GroupKind::Free { rank: 1 });
        // a is trivial; b = c^-1.
        assert_eq!(s.is_identity(&[(0, false)]), Some(true));
        assert_eq!(
            s.is_identity(&[(1, false), (2, false)]),
            Some(true)
        );
        assert_eq!(s.is_identity(&[(1, false)]), Some(false));
    }

    #[test]
    fn coset_enumeration_cyclic_group() {
        // <a | a^3>
        let relations = vec![w(&[(0, false), (0, false), (0, false)])];
        let table = CosetTable::enumerate(1, &relations, 100).unwrap();
        assert_eq!(table.coset_count(), 3);
        assert_eq!(table.trace(0, &w(&[(0, false); 3])), Some(0));
        assert_eq!(table.trace(0, &w(&[(0, false); 2])), Some(2));
    }

    #[test]
    fn coset_enumeration_klein_four() {
        // <a, b | a^2, b^2, abab>
        let relations = vec![
            w(&[(0, false), (0, false)]),
            w(&[(1, false), (1, false)]),
            w(&[(0, false), (1, false), (0, false), (1, false)]),
        ];
        let table = CosetTable::enumerate(2, &relations, 100).unwrap();
        assert_eq!(table.coset_count(), 4);
    }

    #[test]
    fn coset_enumeration_s3_via_simplify() {
        // <a, b | a^2, b^3, (ab)^2> has order 6. The presentation has no
        // singly-occurring generators, so this exercises the fallback.
        let p = Presentation {
            rank: 2,
            relations: vec![
                w(&[(0, false), (0, false)]),
                w(&[(1, false), (1, false), (1, false)]),
                w(&[(0, false), (1, false), (0, false), (1, false)]),
            ],
        };
        let s = simplify(&p, 1000);
        assert_eq!(s.kind, GroupKind::Finite { order: 6 });
        assert_eq!(s.is_identity(&[(1, false); 3]), Some(true));
        assert_eq!(s.is_identity(&[(1, false)]), Some(false));
        assert_eq!(s.free_rank(), None);
    }

    #[test]
    fn enumeration_respects_budget_on_infinite_groups() {
        // <a, b | [a,b]> is Z^2: never closes.
        let p = Presentation {
            rank: 2,
            relations: vec![w(&[
                (0, false),
                (1, false),
                (0, true),
                (1, true),
            ])],
        };
        let s = simplify(&p, 500);
        assert_eq!(s.kind, GroupKind::Unknown);
        assert_eq!(s.is_identity(&[(0, false)]), None);
    }

    #[test]
    fn trivialized_presentation_reports_order_one() {
        // <a, b | a, b> after elimination has no generators left.
        let p = Presentation {
            rank: 2,
            relations: vec![w(&[(0, false)]), w(&[(1, false)])],
        };
        let s = simplify(&p, 100);
        assert_eq!(s.kind, GroupKind::Free { rank: 0 });
        assert_eq!(s.free_rank(), Some(0));
        assert_eq!(s.is_identity(&[(0, false), (1, true)]), Some(true));
    }

    #[test]
    fn rewrite_tracks_chained_eliminations() {
        // <a, b, c | a b^-1, b c^-1>: a = b = c, free of rank 1.
        let p = Presentation {
            rank: 3,
            relations: vec![
                w(&[(0, false), (1, true)]),
                w(&[(1, false), (2, true)]),
            ],
        };
        let s = simplify(&p, 100);
        assert_eq!(s.kind, GroupKind::Free { rank: 1 });
        let img_a = s.rewrite(&[(0, false)]);
        let img_c = s.rewrite(&[(2, false)]);
        assert_eq!(img_a, img_c);
        assert_eq!(img_a.len(), 1);
        assert_eq!(s.is_identity(&[(0, false), (2, true)]), Some(true));
    }
}
