//! Two-level minimization (Quine–McCluskey with an exact cover search) used
//! only to print readable presence conditions.

use std::collections::BTreeSet;

pub(crate) const MAX_VARS: usize = 12;

/// A product term: bit `i` of `mask` set means variable `i` is constrained to
/// bit `i` of `bits`.
#[derive(Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Debug)]
struct Cube {
    mask: u32,
    bits: u32,
}

impl Cube {
    fn covers(self, row: u32) -> bool {
        row & self.mask == self.bits
    }

    fn literals(self) -> u32 {
        self.mask.count_ones()
    }
}

fn prime_implicants(n: usize, on: &[u32]) -> Vec<Cube> {
    let full = (1u32 << n) - 1;
    let mut current: BTreeSet<Cube> = on.iter().map(|&r| Cube { mask: full, bits: r }).collect();
    let mut primes = BTreeSet::new();
    while !current.is_empty() {
        let cubes: Vec<Cube> = current.iter().copied().collect();
        let mut merged = vec![false; cubes.len()];
        let mut next = BTreeSet::new();
        for i in 0..cubes.len() {
            for j in i + 1..cubes.len() {
                let (a, b) = (cubes[i], cubes[j]);
                if a.mask != b.mask {
                    continue;
                }
                let diff = a.bits ^ b.bits;
                if diff.count_ones() == 1 {
                    next.insert(Cube {
                        mask: a.mask & !diff,
                        bits: a.bits & !diff,
                    });
                    merged[i] = true;
                    merged[j] = true;
                }
            }
        }
        for (c, m) in cubes.into_iter().zip(merged) {
            if !m {
                primes.insert(c);
            }
        }
        current = next;
    }
    primes.into_iter().collect()
}

/// Smallest set of primes covering every on-row; ties broken by literal count,
/// then by the deterministic prime order.
fn min_cover(primes: &[Cube], on: &[u32]) -> Vec<Cube> {
    let mut chosen: Vec<usize> = Vec::new();
    let mut remaining: Vec<u32> = on.to_vec();
    // essential primes
    loop {
        let essential = remaining.iter().find_map(|&r| {
            let mut it = primes.iter().enumerate().filter(|(_, p)| p.covers(r));
            let first = it.next()?;
            it.next().is_none().then_some(first.0)
        });
        match essential {
            Some(i) => {
                chosen.push(i);
                remaining.retain(|&r| !primes[i].covers(r));
            }
            None => break,
        }
    }
    if !remaining.is_empty() {
        let candidates: Vec<usize> = (0..primes.len())
            .filter(|i| !chosen.contains(i) && remaining.iter().any(|&r| primes[*i].covers(r)))
            .collect();
        let extra = if candidates.len() <= 20 {
            exact_cover(primes, &candidates, &remaining)
        } else {
            greedy_cover(primes, &candidates, &remaining)
        };
        chosen.extend(extra);
    }
    let mut cubes: Vec<Cube> = chosen.into_iter().map(|i| primes[i]).collect();
    cubes.sort();
    cubes.dedup();
    cubes
}

fn exact_cover(primes: &[Cube], candidates: &[usize], rows: &[u32]) -> Vec<usize> {
    let mut best: Option<(usize, u32, Vec<usize>)> = None;
    for subset in 1u32..1 << candidates.len() {
        let picked: Vec<usize> = (0..candidates.len())
            .filter(|b| subset >> b & 1 == 1)
            .map(|b| candidates[b])
            .collect();
        if let Some((n, _, _)) = &best {
            if picked.len() > *n {
                continue;
            }
        }
        if !rows.iter().all(|&r| picked.iter().any(|&p| primes[p].covers(r))) {
            continue;
        }
        let lits: u32 = picked.iter().map(|&p| primes[p].literals()).sum();
        let better = match &best {
            None => true,
            Some((n, l, _)) => picked.len() < *n || (picked.len() == *n && lits < *l),
        };
        if better {
            best = Some((picked.len(), lits, picked));
        }
    }
    best.map(|(_, _, p)| p).unwrap_or_default()
}

fn greedy_cover(primes: &[Cube], candidates: &[usize], rows: &[u32]) -> Vec<usize> {
    let mut left: Vec<u32> = rows.to_vec();
    let mut picked = Vec::new();
    while !left.is_empty() {
        let &best = candidates
            .iter()
            .max_by_key(|&&p| {
                let gain = left.iter().filter(|&&r| primes[p].covers(r)).count();
                (gain, std::cmp::Reverse(primes[p].literals()))
            })
            .expect("cover exists");
        picked.push(best);
        left.retain(|&r| !primes[best].covers(r));
    }
    picked
}

fn fold(parts: Vec<String>, op: &str) -> String {
    let mut it = parts.into_iter();
    let first = it.next().expect("non-empty");
    it.fold(first, |acc, p| format!("({acc} {op} {p})"))
}

/// Renders the function given by `table` (row `r` assigns bit `i` of `r` to
/// `names[i]`) as a minimal sum of products in the label surface syntax.
pub(crate) fn render_min_dnf(names: &[&str], table: &[bool]) -> String {
    let n = names.len();
    debug_assert_eq!(table.len(), 1 << n);
    let on: Vec<u32> = (0..table.len() as u32).filter(|&r| table[r as usize]).collect();
    if on.is_empty() {
        return "false".into();
    }
    if on.len() == table.len() {
        return "true".into();
    }
    let primes = prime_implicants(n, &on);
    let mut cover = min_cover(&primes, &on);
    // fewer literals first; then variables in declaration order, positive first
    cover.sort_by_key(|c| {
        let key: Vec<u8> = (0..n)
            .map(|i| match (c.mask >> i & 1, c.bits >> i & 1) {
                (1, 1) => 0,
                (1, _) => 1,
                _ => 2,
            })
            .collect();
        (c.literals(), key)
    });
    let terms: Vec<String> = cover
        .into_iter()
        .map(|c| {
            let lits: Vec<String> = (0..n)
                .filter(|i| c.mask >> i & 1 == 1)
                .map(|i| {
                    if c.bits >> i & 1 == 1 {
                        names[i].to_string()
                    } else {
                        format!("!{}", names[i])
                    }
                })
                .collect();
            fold(lits, "&")
        })
        .collect();
    fold(terms, "|")
}

#[cfg(test)]
mod tests {
    use super::*;

    fn table(n: usize, f: impl Fn(&[bool]) -> bool) -> Vec<bool> {
        (0u32..1 << n)
            .map(|r| {
                let a: Vec<bool> = (0..n).map(|i| r >> i & 1 == 1).collect();
                f(&a)
            })
            .collect()
    }

    #[test]
    fn constants() {
        assert_eq!(render_min_dnf(&["a"], &[false, false]), "false");
        assert_eq!(render_min_dnf(&["a"], &[true, true]), "true");
    }

    #[test]
    fn merges_adjacent_minterms() {
        let t = table(2, |a| !a[1]);
        assert_eq!(render_min_dnf(&["FA", "FB"], &t), "!FB");
    }

    #[test]
    fn xor_needs_two_terms() {
        let t = table(2, |a| a[0] != a[1]);
        assert_eq!(render_min_dnf(&["a", "b"], &t), "((a & !b) | (!a & b))");
    }

    #[test]
    fn majority() {
        let t = table(3, |a| (a[0] as u8 + a[1] as u8 + a[2] as u8) >= 2);
        assert_eq!(
            render_min_dnf(&["a", "b", "c"], &t),
            "(((a & b) | (a & c)) | (b & c))"
        );
    }
}
