use serde::{Deserialize, Serialize};

use crate::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ReKind {
    Pilot,
    Data,
}

/// One resource element: a subcarrier on an OFDM symbol.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct ResourceElement {
    pub kind: ReKind,
    pub subcarrier: usize,
    pub symbol: usize,
}

/// Placement of pilot and data REs.
///
/// Signals inside the crate are kept in pilot-first order: all pilot REs in
/// placement order, then all data REs in placement order. Data RE `j` carries
/// codeword symbol `j`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ResourceGrid {
    placement: Vec<ResourceElement>,
    pilot_first: Vec<usize>,
    n_pilot: usize,
}

/// Subcarriers carrying DMRS in each PUCCH Format 2 symbol.
pub const PUCCH_F2_DMRS_SUBCARRIERS: [usize; 4] = [1, 4, 7, 10];

impl ResourceGrid {
    pub fn new(placement: Vec<ResourceElement>) -> Result<Self> {
        if placement.is_empty() {
            return Err(Error::InvalidParameter("resource grid is empty".into()));
        }
        for (i, a) in placement.iter().enumerate() {
            if placement[..i].iter().any(|b| b.subcarrier == a.subcarrier && b.symbol == a.symbol) {
                return Err(Error::InvalidParameter(format!(
                    "RE (subcarrier {}, symbol {}) placed twice",
                    a.subcarrier, a.symbol
                )));
            }
        }
        let pilots = (0..placement.len()).filter(|&i| placement[i].kind == ReKind::Pilot);
        let data = (0..placement.len()).filter(|&i| placement[i].kind == ReKind::Data);
        let pilot_first: Vec<usize> = pilots.chain(data).collect();
        let n_pilot = placement.iter().filter(|r| r.kind == ReKind::Pilot).count();
        Ok(Self {
            placement,
            pilot_first,
            n_pilot,
        })
    }

    /// PUCCH Format 2 over one RB and two OFDM symbols: 8 DMRS and 16 data REs.
    pub fn pucch_f2() -> Self {
        let placement = (0..2)
            .flat_map(|symbol| {
                (0..12).map(move |subcarrier| ResourceElement {
                    kind: if PUCCH_F2_DMRS_SUBCARRIERS.contains(&subcarrier) {
                        ReKind::Pilot
                    } else {
                        ReKind::Data
                    },
                    subcarrier,
                    symbol,
                })
            })
            .collect();
        Self::new(placement).expect("PUCCH F2 layout is valid")
    }

    pub fn placement(&self) -> &[ResourceElement] {
        &self.placement
    }

    pub fn len(&self) -> usize {
        self.placement.len()
    }

    pub fn is_empty(&self) -> bool {
        self.placement.is_empty()
    }

    pub fn n_pilot(&self) -> usize {
        self.n_pilot
    }

    pub fn n_data(&self) -> usize {
        self.placement.len() - self.n_pilot
    }

    /// REs in pilot-first order.
    pub fn ordered(&self) -> impl Iterator<Item = &ResourceElement> {
        self.pilot_first.iter().map(|&i| &self.placement[i])
    }

    /// Subcarrier index of each RE in pilot-first order.
    pub fn ordered_subcarriers(&self) -> Vec<usize> {
        self.ordered().map(|r| r.subcarrier).collect()
    }

    /// Reorders a pilot-first vector into placement order.
    pub fn to_placement_order<T: Copy>(&self, pilot_first: &[T]) -> Vec<T> {
        assert_eq!(pilot_first.len(), self.len());
        let mut out = pilot_first.to_vec();
        for (pos, &slot) in self.pilot_first.iter().enumerate() {
            out[slot] = pilot_first[pos];
        }
        out
    }

    /// Reorders a placement-order vector into pilot-first order.
    pub fn to_pilot_first<T: Copy>(&self, placed: &[T]) -> Vec<T> {
        assert_eq!(placed.len(), self.len());
        self.pilot_first.iter().map(|&i| placed[i]).collect()
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn pucch_f2_counts() {
        let g = ResourceGrid::pucch_f2();
        assert_eq!((g.n_pilot(), g.n_data(), g.len()), (8, 16, 24));
        let subs = g.ordered_subcarriers();
        assert_eq!(&subs[..8], &[1, 4, 7, 10, 1, 4, 7, 10]);
        assert_eq!(&subs[8..11], &[0, 2, 3]);
    }

    #[test]
    fn reorder_round_trip() {
        let g = ResourceGrid::pucch_f2();
        let v: Vec<usize> = (0..24).collect();
        assert_eq!(g.to_pilot_first(&g.to_placement_order(&v)), v);
        assert_eq!(g.to_placement_order(&g.to_pilot_first(&v)), v);
        let placed = g.to_placement_order(&v);
        assert_eq!(placed[1], 0, "subcarrier 1 of symbol 0 is the first pilot");
        assert_eq!(placed[0], 8, "subcarrier 0 carries the first data symbol");
    }

    #[test]
    fn duplicate_positions_rejected() {
        let re = ResourceElement {
            kind: ReKind::Data,
            subcarrier: 0,
            symbol: 0,
        };
        assert!(ResourceGrid::new(vec![re, re]).is_err());
        assert!(ResourceGrid::new(vec![]).is_err());
    }
}
