//! Brute-force symmetric group character table, used as independent ground
//! truth for the classical limit of the Hecke table.
//!
//! For each shape the permutation module on row assignments (tabloids) is
//! realized literally: every permutation acts on the set of assignments and
//! its character value is the number of fixed points. Irreducible characters
//! are extracted by Gram-Schmidt against the class-size inner product, in
//! the canonical shape order, which is compatible with dominance.

use hecke::diagrams::{partitions_of, Partition};

/// The character table of the symmetric group on `n` letters: labels in the
/// canonical partition order, `table[module][class]` integer entries, and
/// the class sizes in the same order.
pub struct ClassicalTable {
    pub labels: Vec<Partition>,
    pub table: Vec<Vec<i64>>,
    pub class_sizes: Vec<i64>,
}

/// Cycle type of a permutation given in one-line notation.
fn cycle_type(perm: &[usize]) -> Partition {
    let n = perm.len();
    let mut seen = vec![false; n];
    let mut cycles = Vec::new();
    for start in 0..n {
        if seen[start] {
            continue;
        }
        let mut len = 0;
        let mut at = start;
        while !seen[at] {
            seen[at] = true;
            at = perm[at];
            len += 1;
        }
        cycles.push(len);
    }
    cycles.sort_unstable_by(|a, b| b.cmp(a));
    Partition::new(cycles)
}

/// All permutations of `0..n` in one-line notation.
fn permutations(n: usize) -> Vec<Vec<usize>> {
    let mut out = Vec::new();
    let mut current: Vec<usize> = (0..n).collect();
    heap_permute(&mut current, n, &mut out);
    out
}

fn heap_permute(current: &mut Vec<usize>, k: usize, out: &mut Vec<Vec<usize>>) {
    if k <= 1 {
        out.push(current.clone());
        return;
    }
    for i in 0..k {
        heap_permute(current, k - 1, out);
        if k % 2 == 0 {
            current.swap(i, k - 1);
        } else {
            current.swap(0, k - 1);
        }
    }
}

/// All row assignments of `0..n` with the given row sizes: entry `i` of an
/// assignment is the row containing letter `i`.
fn assignments(shape: &Partition) -> Vec<Vec<u8>> {
    let mut template: Vec<u8> = Vec::new();
    for (row, &width) in shape.parts().iter().enumerate() {
        template.extend(std::iter::repeat(row as u8).take(width));
    }
    let mut out = Vec::new();
    distinct_permutations(&mut template, 0, &mut out);
    out
}

fn distinct_permutations(items: &mut Vec<u8>, start: usize, out: &mut Vec<Vec<u8>>) {
    if start == items.len() {
        out.push(items.clone());
        return;
    }
    let mut used = [false; 16];
    for i in start..items.len() {
        let v = items[i] as usize;
        if used[v] {
            continue;
        }
        used[v] = true;
        items.swap(start, i);
        distinct_permutations(items, start + 1, out);
        items.swap(start, i);
    }
}

/// Brute-force table for the symmetric group on `n` letters.
pub fn classical_character_table(n: usize) -> ClassicalTable {
    let labels = partitions_of(n);
    let class_index: std::collections::HashMap<Partition, usize> = labels
        .iter()
        .enumerate()
        .map(|(i, p)| (p.clone(), i))
        .collect();
    let perms = permutations(n);
    let mut class_sizes = vec![0i64; labels.len()];
    let perm_classes: Vec<usize> = perms
        .iter()
        .map(|p| {
            let c = class_index[&cycle_type(p)];
            class_sizes[c] += 1;
            c
        })
        .collect();

    // Permutation module characters: fixed row assignments per class.
    let mut permanent_chars: Vec<Vec<i64>> = Vec::with_capacity(labels.len());
    for shape in &labels {
        let tabloids = assignments(shape);
        let mut totals = vec![0i64; labels.len()];
        for (perm, &class) in perms.iter().zip(&perm_classes) {
            let fixed = tabloids
                .iter()
                .filter(|a| (0..n).all(|i| a[perm[i]] == a[i]))
                .count();
            totals[class] += fixed as i64;
        }
        let values = totals
            .iter()
            .zip(&class_sizes)
            .map(|(t, s)| {
                assert_eq!(t % s, 0, "class function must be constant on classes");
                t / s
            })
            .collect();
        permanent_chars.push(values);
    }

    // Gram-Schmidt in canonical order: every permutation module contains the
    // irreducible of its own shape once, plus earlier shapes only.
    let order: i64 = (1..=n as i64).product();
    let inner = |a: &[i64], b: &[i64]| -> i64 {
        let weighted: i64 = a
            .iter()
            .zip(b)
            .zip(&class_sizes)
            .map(|((x, y), s)| x * y * s)
            .sum();
        assert_eq!(weighted % order, 0, "inner product must be integral");
        weighted / order
    };
    let mut table: Vec<Vec<i64>> = Vec::with_capacity(labels.len());
    for phi in permanent_chars {
        let mut reduced = phi;
        for prev in &table {
            let mult = inner(&reduced, prev);
            for (r, p) in reduced.iter_mut().zip(prev) {
                *r -= mult * p;
            }
        }
        assert_eq!(inner(&reduced, &reduced), 1, "residue must be irreducible");
        table.push(reduced);
    }
    ClassicalTable {
        labels,
        table,
        class_sizes,
    }
}
