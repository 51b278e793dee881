use rand::seq::SliceRandom;

use crate::error::{Error, Result};
use crate::seed;

/// Where the short remainder segment goes.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum Variant {
    /// Remainder last.
    #[default]
    Tc1,
    /// Remainder first.
    Tc2,
}

impl std::str::FromStr for Variant {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.to_ascii_lowercase().as_str() {
            "tc1" => Ok(Variant::Tc1),
            "tc2" => Ok(Variant::Tc2),
            _ => Err(Error::invalid(format!("unknown partition variant '{s}'"))),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct PartitionScheme {
    pub segments: Vec<Vec<usize>>,
    pub segment_size: usize,
    pub variant: Variant,
    pub seed: u64,
}

impl PartitionScheme {
    /// Index of the short segment, if the subject count left one.
    pub fn remainder(&self) -> Option<usize> {
        self.segments.iter().position(|s| s.len() != self.segment_size)
    }

    /// Indices of the full-size segments.
    pub fn full_segments(&self) -> Vec<usize> {
        (0..self.segments.len())
            .filter(|&i| self.segments[i].len() == self.segment_size)
            .collect()
    }

    pub fn subject_count(&self) -> usize {
        self.segments.iter().map(Vec::len).sum()
    }
}

/// Shuffles the subjects with `seed` and cuts them into segments of
/// `segment_size`; a shorter remainder is placed according to `variant`.
pub fn partition_subjects(ids: &[usize], segment_size: usize, variant: Variant, seed: u64) -> Result<PartitionScheme> {
    if ids.is_empty() || segment_size == 0 {
        return Err(Error::invalid("need subjects and a positive segment size"));
    }
    let mut sorted = ids.to_vec();
    sorted.sort_unstable();
    if sorted.windows(2).any(|w| w[0] == w[1]) {
        return Err(Error::invalid("duplicate subject id"));
    }
    let mut shuffled = ids.to_vec();
    shuffled.shuffle(&mut seed::rng(seed));
    let mut segments: Vec<Vec<usize>> = shuffled.chunks(segment_size).map(<[usize]>::to_vec).collect();
    if variant == Variant::Tc2 && segments.last().is_some_and(|s| s.len() != segment_size) {
        let rem = segments.pop().expect("non-empty");
        segments.insert(0, rem);
    }
    Ok(PartitionScheme {
        segments,
        segment_size,
        variant,
        seed,
    })
}

/// All k-subsets of 0..n in lexicographic order.
pub fn combinations(n: usize, k: usize) -> Vec<Vec<usize>> {
    let mut out = Vec::new();
    if k > n {
        return out;
    }
    let mut idx: Vec<usize> = (0..k).collect();
    loop {
        out.push(idx.clone());
        let Some(i) = (0..k).rev().find(|&i| idx[i] != i + n - k) else {
            return out;
        };
        idx[i] += 1;
        for j in i + 1..k {
            idx[j] = idx[j - 1] + 1;
        }
    }
}

/// Subject sets of size `population` built from whole segments: every choice
/// of full segments, plus the remainder when the population needs it. The
/// whole cohort is a single combination.
pub fn enumerate_combinations(scheme: &PartitionScheme, population: usize) -> Result<Vec<Vec<usize>>> {
    let total = scheme.subject_count();
    let union =
        |segs: &[usize]| -> Vec<usize> { segs.iter().flat_map(|&s| scheme.segments[s].iter().copied()).collect() };
    if population == total {
        return Ok(vec![union(&(0..scheme.segments.len()).collect::<Vec<_>>())]);
    }
    let full = scheme.full_segments();
    let size = scheme.segment_size;
    let (fixed, rest) = if population.is_multiple_of(size) {
        (None, population / size)
    } else {
        match scheme.remainder() {
            Some(r)
                if population > scheme.segments[r].len()
                    && (population - scheme.segments[r].len()).is_multiple_of(size) =>
            {
                (Some(r), (population - scheme.segments[r].len()) / size)
            }
            _ => {
                return Err(Error::invalid(format!(
                    "population {population} cannot be built from segments of {size}"
                )))
            }
        }
    };
    if rest == 0 || rest > full.len() {
        return Err(Error::invalid(format!(
            "population {population} needs {rest} of {} full segments",
            full.len()
        )));
    }
    Ok(combinations(full.len(), rest)
        .into_iter()
        .map(|c| {
            let mut segs: Vec<usize> = fixed.into_iter().collect();
            segs.extend(c.iter().map(|&i| full[i]));
            segs.sort_unstable();
            union(&segs)
        })
        .collect())
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn combination_counts() {
        assert_eq!(combinations(12, 2).len(), 66);
        assert_eq!(combinations(5, 0), vec![Vec::<usize>::new()]);
        assert_eq!(
            combinations(4, 2),
            vec![vec![0, 1], vec![0, 2], vec![0, 3], vec![1, 2], vec![1, 3], vec![2, 3]]
        );
        assert!(combinations(2, 3).is_empty());
    }

    #[test]
    fn remainder_placement() {
        let ids: Vec<usize> = (0..638).collect();
        let a = partition_subjects(&ids, 50, Variant::Tc1, 1).unwrap();
        assert_eq!(a.segments.len(), 13);
        assert_eq!(a.segments[12].len(), 38);
        assert_eq!(a.remainder(), Some(12));
        let b = partition_subjects(&ids, 50, Variant::Tc2, 1).unwrap();
        assert_eq!(b.segments[0].len(), 38);
        assert_eq!(b.segments[0], a.segments[12]);
        assert_eq!(enumerate_combinations(&a, 638).unwrap().len(), 1);
        assert_eq!(enumerate_combinations(&a, 100).unwrap().len(), 66);
        // remainder plus one full segment
        assert_eq!(enumerate_combinations(&a, 88).unwrap().len(), 12);
        assert!(enumerate_combinations(&a, 77).is_err());
    }

    #[test]
    fn two_segments_one_combination() {
        let ids: Vec<usize> = (0..100).collect();
        let s = partition_subjects(&ids, 50, Variant::Tc1, 3).unwrap();
        assert_eq!(enumerate_combinations(&s, 100).unwrap().len(), 1);
        assert_eq!(enumerate_combinations(&s, 50).unwrap().len(), 2);
        assert!(partition_subjects(&[1, 1], 1, Variant::Tc1, 0).is_err());
    }
}
