//! Versioned flat file for trained agents.
//!
//! All integers and floats are little-endian:
//!
//! ```text
//! magic        8 bytes  "TSQAGENT"
//! version      u32      1
//! n_sizes      u32
//! sizes        n_sizes x u32      layer widths, input first
//! norms        6 x f64            latency min/max, complexity min/max, data_size min/max
//! seed         u64
//! episodes     u64
//! n_params     u64
//! params       n_params x f64
//! ```

use std::fs;
use std::path::Path;

use super::agent::TrainedAgent;
use super::encoding::{Bounds, NormBounds};
use super::qnet::QNetwork;
use crate::error::RlError;

pub const MAGIC: &[u8; 8] = b"TSQAGENT";
pub const VERSION: u32 = 1;

pub fn to_bytes(agent: &TrainedAgent) -> Vec<u8> {
    let net = &agent.network;
    let mut out = Vec::with_capacity(64 + net.params().len() * 8);
    out.extend_from_slice(MAGIC);
    out.extend_from_slice(&VERSION.to_le_bytes());
    out.extend_from_slice(&(net.sizes().len() as u32).to_le_bytes());
    for s in net.sizes() {
        out.extend_from_slice(&(*s as u32).to_le_bytes());
    }
    let n = &agent.norms;
    for v in [
        n.latency.min,
        n.latency.max,
        n.complexity.min,
        n.complexity.max,
        n.data_size.min,
        n.data_size.max,
    ] {
        out.extend_from_slice(&v.to_le_bytes());
    }
    out.extend_from_slice(&agent.seed.to_le_bytes());
    out.extend_from_slice(&agent.episodes.to_le_bytes());
    out.extend_from_slice(&(net.params().len() as u64).to_le_bytes());
    for p in net.params() {
        out.extend_from_slice(&p.to_le_bytes());
    }
    out
}

struct Reader<'a> {
    buf: &'a [u8],
    pos: usize,
}

impl<'a> Reader<'a> {
    fn take(&mut self, n: usize) -> Result<&'a [u8], RlError> {
        let end = self
            .pos
            .checked_add(n)
            .filter(|e| *e <= self.buf.len())
            .ok_or_else(|| RlError::Format(format!("truncated at byte {} (wanted {n} more)", self.pos)))?;
        let s = &self.buf[self.pos..end];
        self.pos = end;
        Ok(s)
    }

    fn u32(&mut self) -> Result<u32, RlError> {
        Ok(u32::from_le_bytes(self.take(4)?.try_into().unwrap()))
    }

    fn u64(&mut self) -> Result<u64, RlError> {
        Ok(u64::from_le_bytes(self.take(8)?.try_into().unwrap()))
    }

    fn f64(&mut self) -> Result<f64, RlError> {
        Ok(f64::from_le_bytes(self.take(8)?.try_into().unwrap()))
    }
}

pub fn from_bytes(buf: &[u8]) -> Result<TrainedAgent, RlError> {
    let mut r = Reader { buf, pos: 0 };
    if r.take(8)? != MAGIC {
        return Err(RlError::Format("bad magic; not an agent file".into()));
    }
    let version = r.u32()?;
    if version != VERSION {
        return Err(RlError::Format(format!("unsupported version {version}")));
    }
    let n_sizes = r.u32()? as usize;
    if !(2..=16).contains(&n_sizes) {
        return Err(RlError::Format(format!("implausible layer count {n_sizes}")));
    }
    let sizes = (0..n_sizes)
        .map(|_| r.u32().map(|s| s as usize))
        .collect::<Result<Vec<_>, _>>()?;
    if sizes[0] != super::STATE_DIM || sizes[n_sizes - 1] != 3 || sizes.contains(&0) {
        return Err(RlError::Format(format!("unsupported architecture {sizes:?}")));
    }
    let mut bounds = || -> Result<Bounds, RlError> { Ok(Bounds::new(r.f64()?, r.f64()?)) };
    let norms = NormBounds {
        latency: bounds()?,
        complexity: bounds()?,
        data_size: bounds()?,
    };
    let seed = r.u64()?;
    let episodes = r.u64()?;
    let n_params = r.u64()? as usize;
    let expected: usize = sizes.windows(2).map(|w| w[0] * w[1] + w[1]).sum();
    if n_params != expected {
        return Err(RlError::Format(format!(
            "parameter count {n_params} does not match architecture ({expected})"
        )));
    }
    let params = (0..n_params).map(|_| r.f64()).collect::<Result<Vec<_>, _>>()?;
    if r.pos != buf.len() {
        return Err(RlError::Format(format!("{} trailing bytes", buf.len() - r.pos)));
    }
    if params.iter().any(|p| !p.is_finite()) {
        return Err(RlError::Format("non-finite parameter".into()));
    }
    let network = QNetwork::from_params(&sizes, params).expect("parameter count checked above");
    Ok(TrainedAgent {
        network,
        norms,
        seed,
        episodes,
    })
}

pub fn save(agent: &TrainedAgent, path: &Path) -> Result<(), RlError> {
    fs::write(path, to_bytes(agent))?;
    Ok(())
}

pub fn load(path: &Path) -> Result<TrainedAgent, RlError> {
    from_bytes(&fs::read(path)?)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rl::qnet::DEFAULT_ARCHITECTURE;
    use crate::SimRng;
    use proptest::prelude::*;
    use rand::SeedableRng;

    fn agent(seed: u64) -> TrainedAgent {
        TrainedAgent {
            network: QNetwork::init(&DEFAULT_ARCHITECTURE, &mut SimRng::seed_from_u64(seed)),
            norms: NormBounds {
                latency: Bounds::new(0.001, 1.0),
                complexity: Bounds::new(1e4, 1e9),
                data_size: Bounds::new(0.001, 0.1),
            },
            seed,
            episodes: 1000,
        }
    }

    proptest! {
        #[test]
        fn round_trips_exactly(seed in any::<u64>()) {
            let a = agent(seed);
            prop_assert_eq!(from_bytes(&to_bytes(&a)).unwrap(), a);
        }
    }

    #[test]
    fn header_layout() {
        let bytes = to_bytes(&agent(1));
        assert_eq!(&bytes[..8], MAGIC);
        assert_eq!(u32::from_le_bytes(bytes[8..12].try_into().unwrap()), 1);
        assert_eq!(u32::from_le_bytes(bytes[12..16].try_into().unwrap()), 4);
        let n_params = 7 * 32 + 32 + 32 * 32 + 32 + 32 * 3 + 3;
        assert_eq!(bytes.len(), 8 + 4 + 4 + 4 * 4 + 6 * 8 + 8 + 8 + 8 + n_params * 8);
    }

    #[test]
    fn rejects_corruption() {
        let bytes = to_bytes(&agent(2));
        assert!(from_bytes(&bytes[..bytes.len() - 1]).is_err());
        let mut bad = bytes.clone();
        bad[0] = b'X';
        assert!(from_bytes(&bad).is_err());
        let mut extra = bytes;
        extra.push(0);
        assert!(from_bytes(&extra).is_err());
    }
}
