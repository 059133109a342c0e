//! Binary file formats. Integers are little-endian, bit payloads packed
//! most significant bit first and zero-padded to a byte.
//!
//! Block container (`RWS1`):
//!
//! ```text
//! magic "RWS1" | version u8 = 1 | n u64 | sigma u16 | c u32 | blocks u32
//! per block: k u8 | payload bits u32 | payload
//! ```
//!
//! Bit 31 of `c` marks a growing block schedule.
//!
//! Entropy-only (`RWSE`): magic, version u8, n u64, sigma u16, then a bit
//! buffer (`bits u64 | payload`).
//!
//! Stream snapshot (`RWSS`): magic, version u8, record bits u8, count u64,
//! then each record in `ceil(bits / 8)` little-endian bytes.

use rwstreams_core::bwt::{EntropyOnly, EO_MAGIC, EO_VERSION};
use rwstreams_core::coders::BitBuffer;
use rwstreams_core::universal::{Block, BlockSchedule, CompressedContainer, MAGIC, MAX_BLOCK, VERSION};
use rwstreams_core::{Error, Result};

pub const SNAPSHOT_MAGIC: [u8; 4] = *b"RWSS";
pub const SNAPSHOT_VERSION: u8 = 1;

const GROWING: u32 = 1 << 31;

/// Cursor over a byte slice that reports truncation as a format error.
struct Reader<'a> {
    data: &'a [u8],
    pos: usize,
}

impl<'a> Reader<'a> {
    fn new(data: &'a [u8]) -> Self {
        Reader { data, pos: 0 }
    }

    fn take(&mut self, len: usize) -> Result<&'a [u8]> {
        let end = self
            .pos
            .checked_add(len)
            .filter(|&e| e <= self.data.len())
            .ok_or_else(|| Error::Format(format!("truncated at byte {}", self.data.len())))?;
        let out = &self.data[self.pos..end];
        self.pos = end;
        Ok(out)
    }

    fn array<const N: usize>(&mut self) -> Result<[u8; N]> {
        Ok(self.take(N)?.try_into().unwrap())
    }

    fn u8(&mut self) -> Result<u8> {
        Ok(self.take(1)?[0])
    }

    fn u16(&mut self) -> Result<u16> {
        self.array().map(u16::from_le_bytes)
    }

    fn u32(&mut self) -> Result<u32> {
        self.array().map(u32::from_le_bytes)
    }

    fn u64(&mut self) -> Result<u64> {
        self.array().map(u64::from_le_bytes)
    }

    fn bits(&mut self, len: u64) -> Result<BitBuffer> {
        let bytes = usize::try_from(len.div_ceil(8))
            .map_err(|_| Error::Format(format!("payload of {len} bits")))?;
        BitBuffer::from_bytes(self.take(bytes)?.to_vec(), len)
    }

    fn finish(self) -> Result<()> {
        if self.pos != self.data.len() {
            return Err(Error::Format(format!(
                "{} trailing bytes",
                self.data.len() - self.pos
            )));
        }
        Ok(())
    }
}

fn expect_header(r: &mut Reader<'_>, magic: [u8; 4], version: u8) -> Result<()> {
    let got = r.array::<4>()?;
    if got != magic {
        return Err(Error::Format(format!(
            "bad magic {:?}, expected {:?}",
            String::from_utf8_lossy(&got),
            String::from_utf8_lossy(&magic)
        )));
    }
    let v = r.u8()?;
    if v != version {
        return Err(Error::Format(format!("unsupported version {v}")));
    }
    Ok(())
}

pub fn write_container(c: &CompressedContainer) -> Vec<u8> {
    let mut out = Vec::new();
    out.extend_from_slice(&c.magic);
    out.push(c.version);
    out.extend_from_slice(&c.n.to_le_bytes());
    out.extend_from_slice(&c.sigma.to_le_bytes());
    let size = match c.schedule {
        BlockSchedule::Fixed(c) => c,
        BlockSchedule::Growing(c) => c | GROWING,
    };
    out.extend_from_slice(&size.to_le_bytes());
    out.extend_from_slice(&(c.blocks.len() as u32).to_le_bytes());
    for b in &c.blocks {
        out.push(b.k);
        out.extend_from_slice(&(b.payload.len() as u32).to_le_bytes());
        out.extend_from_slice(b.payload.as_bytes());
    }
    out
}

pub fn read_container(data: &[u8]) -> Result<CompressedContainer> {
    let mut r = Reader::new(data);
    expect_header(&mut r, MAGIC, VERSION)?;
    let n = r.u64()?;
    let sigma = r.u16()?;
    let size = r.u32()?;
    let c = size & !GROWING;
    if c == 0 || c > MAX_BLOCK {
        return Err(Error::Format(format!("block size {c} outside 1..={MAX_BLOCK}")));
    }
    let schedule = if size & GROWING != 0 {
        BlockSchedule::Growing(c)
    } else {
        BlockSchedule::Fixed(c)
    };
    let count = r.u32()?;
    let mut blocks = Vec::new();
    for _ in 0..count {
        let k = r.u8()?;
        let len = r.u32()?;
        blocks.push(Block {
            k,
            payload: r.bits(u64::from(len))?,
        });
    }
    r.finish()?;
    Ok(CompressedContainer {
        magic: MAGIC,
        version: VERSION,
        n,
        sigma,
        schedule,
        blocks,
    })
}

pub fn write_bits(out: &mut Vec<u8>, b: &BitBuffer) {
    out.extend_from_slice(&b.len().to_le_bytes());
    out.extend_from_slice(b.as_bytes());
}

pub fn write_eo(eo: &EntropyOnly) -> Vec<u8> {
    let mut out = Vec::new();
    out.extend_from_slice(&EO_MAGIC);
    out.push(EO_VERSION);
    out.extend_from_slice(&eo.n.to_le_bytes());
    out.extend_from_slice(&eo.sigma.to_le_bytes());
    write_bits(&mut out, &eo.payload);
    out
}

pub fn read_eo(data: &[u8]) -> Result<EntropyOnly> {
    let mut r = Reader::new(data);
    expect_header(&mut r, EO_MAGIC, EO_VERSION)?;
    let n = r.u64()?;
    let sigma = r.u16()?;
    let len = r.u64()?;
    let payload = r.bits(len)?;
    r.finish()?;
    Ok(EntropyOnly { n, sigma, payload })
}

/// Records of one stream, each below `2^record_bits`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Snapshot {
    pub record_bits: u8,
    pub records: Vec<u128>,
}

impl Snapshot {
    fn record_bytes(&self) -> usize {
        usize::from(self.record_bits).div_ceil(8)
    }
}

pub fn write_snapshot(s: &Snapshot) -> Vec<u8> {
    let width = s.record_bytes();
    let mut out = Vec::with_capacity(14 + width * s.records.len());
    out.extend_from_slice(&SNAPSHOT_MAGIC);
    out.push(SNAPSHOT_VERSION);
    out.push(s.record_bits);
    out.extend_from_slice(&(s.records.len() as u64).to_le_bytes());
    for r in &s.records {
        out.extend_from_slice(&r.to_le_bytes()[..width]);
    }
    out
}

pub fn read_snapshot(data: &[u8]) -> Result<Snapshot> {
    let mut r = Reader::new(data);
    expect_header(&mut r, SNAPSHOT_MAGIC, SNAPSHOT_VERSION)?;
    let record_bits = r.u8()?;
    if record_bits == 0 || record_bits > 128 {
        return Err(Error::Format(format!("record width {record_bits} outside 1..=128")));
    }
    let count = r.u64()?;
    let mut snap = Snapshot {
        record_bits,
        records: Vec::new(),
    };
    let width = snap.record_bytes();
    let body = r.take(
        usize::try_from(count)
            .ok()
            .and_then(|c| c.checked_mul(width))
            .ok_or_else(|| Error::Format(format!("{count} records")))?,
    )?;
    r.finish()?;
    for chunk in body.chunks(width) {
        let mut bytes = [0u8; 16];
        bytes[..width].copy_from_slice(chunk);
        let rec = u128::from_le_bytes(bytes);
        if record_bits < 128 && rec >> record_bits != 0 {
            return Err(Error::Format(format!("record {rec} wider than {record_bits} bits")));
        }
        snap.records.push(rec);
    }
    Ok(snap)
}
