//! Colorings of a sequence and their segment/boundary views.
//!
//! Positions are 0-based in the `colors` vector. Segments and boundaries use
//! the 1-based coordinates that appear in output files: a segment covers
//! positions `start..=end`, and a boundary at gap `k` lies between positions
//! `k` and `k + 1`.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct Annotation {
    colors: Vec<usize>,
}

/// Maximal run of one color, 1-based inclusive.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct Segment {
    pub start: usize,
    pub end: usize,
    pub color: usize,
}

/// A color change between positions `gap` and `gap + 1` (1-based).
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct Boundary {
    pub gap: usize,
    pub from: usize,
    pub to: usize,
}

impl Annotation {
    pub fn new(colors: Vec<usize>) -> Self {
        Annotation { colors }
    }

    /// Rebuilds a coloring from segments that must tile `1..=len` in order.
    /// Adjacent segments of the same color are accepted and merge.
    pub fn from_segments(segments: &[Segment]) -> Result<Self> {
        let mut colors = Vec::new();
        for seg in segments {
            if seg.start != colors.len() + 1 || seg.end < seg.start {
                return Err(Error::InvalidSegments(format!(
                    "segment {}..{} does not continue from position {}",
                    seg.start,
                    seg.end,
                    colors.len()
                )));
            }
            colors.extend(std::iter::repeat_n(seg.color, seg.end - seg.start + 1));
        }
        Ok(Annotation { colors })
    }

    pub fn len(&self) -> usize {
        self.colors.len()
    }

    pub fn is_empty(&self) -> bool {
        self.colors.is_empty()
    }

    pub fn colors(&self) -> &[usize] {
        &self.colors
    }

    pub fn into_colors(self) -> Vec<usize> {
        self.colors
    }

    pub fn segments(&self) -> Vec<Segment> {
        let mut out: Vec<Segment> = Vec::new();
        for (i, &c) in self.colors.iter().enumerate() {
            match out.last_mut() {
                Some(seg) if seg.color == c => seg.end = i + 1,
                _ => out.push(Segment { start: i + 1, end: i + 1, color: c }),
            }
        }
        out
    }

    /// The boundary set B(A), ordered by gap.
    pub fn boundaries(&self) -> Vec<Boundary> {
        self.colors
            .windows(2)
            .enumerate()
            .filter(|(_, w)| w[0] != w[1])
            .map(|(i, w)| Boundary { gap: i + 1, from: w[0], to: w[1] })
            .collect()
    }

    pub fn boundary_count(&self) -> usize {
        self.colors.windows(2).filter(|w| w[0] != w[1]).count()
    }
}

impl From<Vec<usize>> for Annotation {
    fn from(colors: Vec<usize>) -> Self {
        Annotation::new(colors)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    #[test]
    fn segments_and_boundaries() {
        let a = Annotation::new(vec![0, 0, 0, 1, 1, 2]);
        assert_eq!(
            a.segments(),
            vec![
                Segment { start: 1, end: 3, color: 0 },
                Segment { start: 4, end: 5, color: 1 },
                Segment { start: 6, end: 6, color: 2 },
            ]
        );
        assert_eq!(
            a.boundaries(),
            vec![Boundary { gap: 3, from: 0, to: 1 }, Boundary { gap: 5, from: 1, to: 2 }]
        );
    }

    #[test]
    fn empty_annotation() {
        let a = Annotation::new(vec![]);
        assert!(a.segments().is_empty());
        assert!(a.boundaries().is_empty());
    }

    #[test]
    fn from_segments_rejects_gaps() {
        let segs = [Segment { start: 1, end: 2, color: 0 }, Segment { start: 4, end: 5, color: 1 }];
        assert!(Annotation::from_segments(&segs).is_err());
    }

    proptest! {
        #[test]
        fn segments_partition_and_roundtrip(colors in prop::collection::vec(0usize..3, 0..40)) {
            let a = Annotation::new(colors);
            let segs = a.segments();
            let covered: usize = segs.iter().map(|s| s.end - s.start + 1).sum();
            prop_assert_eq!(covered, a.len());
            for w in segs.windows(2) {
                prop_assert!(w[0].color != w[1].color);
                prop_assert_eq!(w[0].end + 1, w[1].start);
            }
            prop_assert_eq!(segs.len().saturating_sub(1), a.boundaries().len());
            prop_assert_eq!(Annotation::from_segments(&segs).unwrap(), a);
        }
    }
}
