use super::format::{draw_format, draw_version};
use super::{
    apply_mask, build_function_patterns, encode_segment, penalty_score, place_codewords, BitString, BlockStructure,
    EcLevel, EncodeError, MaskId, ModuleMatrix, QrVersion, Segment,
};
use crate::gf256::rs_encode;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum MaskPolicy {
    /// Evaluate all eight masks and keep the lowest penalty.
    #[default]
    Auto,
    Force(MaskId),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum VersionPolicy {
    /// Smallest version that fits.
    #[default]
    Auto,
    Force(QrVersion),
}

fn total_bits(segments: &[Segment], version: QrVersion) -> Option<usize> {
    segments.iter().map(|s| s.encoded_bits(version)).sum()
}

/// Smallest version whose data capacity holds every segment. Header widths
/// are recomputed for each version band.
pub fn choose_version(segments: &[Segment], ec: EcLevel) -> Result<QrVersion, EncodeError> {
    if segments.is_empty() {
        return Err(EncodeError::EmptyInput);
    }
    QrVersion::all()
        .find(|&v| total_bits(segments, v).is_some_and(|bits| bits <= BlockStructure::new(v, ec).data_codewords() * 8))
        .ok_or_else(|| EncodeError::TooLarge { bits: total_bits(segments, QrVersion::MAX).unwrap_or(usize::MAX), ec })
}

/// Segment bits, terminator, byte alignment and 0xEC/0x11 padding, sized to
/// the data capacity of `(version, ec)`.
pub fn assemble_codewords(segments: &[Segment], version: QrVersion, ec: EcLevel) -> Result<Vec<u8>, EncodeError> {
    let capacity_bits = BlockStructure::new(version, ec).data_codewords() * 8;
    let mut bits = BitString::new();
    for seg in segments {
        bits.extend(&encode_segment(seg, version));
    }
    let fits = total_bits(segments, version).is_some_and(|b| b <= capacity_bits);
    if !fits {
        return Err(EncodeError::InvalidForcedVersion { bits: bits.len(), version, ec });
    }
    let terminator = (capacity_bits - bits.len()).min(4);
    bits.push(0, terminator);
    bits.push(0, (8 - bits.len() % 8) % 8);
    let mut out = bits.to_bytes();
    for pad in [0xEC, 0x11].into_iter().cycle() {
        if out.len() * 8 >= capacity_bits {
            break;
        }
        out.push(pad);
    }
    Ok(out)
}

/// Splits data codewords into per-block slices.
pub fn split_blocks<'a>(data: &'a [u8], structure: &BlockStructure) -> Vec<&'a [u8]> {
    assert_eq!(data.len(), structure.data_codewords(), "data length does not match block structure");
    let mut rest = data;
    structure
        .data_lengths()
        .map(|len| {
            let (block, tail) = rest.split_at(len);
            rest = tail;
            block
        })
        .collect()
}

/// Column-wise interleave: first codeword of each block, then the second,
/// and so on, skipping blocks that have run out.
pub fn interleave<T: AsRef<[u8]>>(blocks: &[T]) -> Vec<u8> {
    let longest = blocks.iter().map(|b| b.as_ref().len()).max().unwrap_or(0);
    let mut out = Vec::with_capacity(blocks.iter().map(|b| b.as_ref().len()).sum());
    for i in 0..longest {
        out.extend(blocks.iter().filter_map(|b| b.as_ref().get(i)));
    }
    out
}

/// Appends per-block EC codewords and interleaves data then EC.
pub fn interleave_blocks(data: &[u8], version: QrVersion, ec: EcLevel) -> Vec<u8> {
    let structure = BlockStructure::new(version, ec);
    let blocks = split_blocks(data, &structure);
    let ecc: Vec<Vec<u8>> =
        blocks.iter().map(|b| rs_encode(b, structure.ec_per_block).expect("table EC counts are in range")).collect();
    let mut out = interleave(&blocks);
    out.extend(interleave(&ecc));
    out
}

/// Encoder output: the finished symbol and the parameters chosen for it.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct EncodedSymbol {
    pub matrix: ModuleMatrix,
    pub version: QrVersion,
    pub ec: EcLevel,
    pub mask: MaskId,
}

fn finish(base: &ModuleMatrix, version: QrVersion, ec: EcLevel, mask: MaskId) -> ModuleMatrix {
    let mut m = apply_mask(base, mask);
    draw_format(&mut m, ec, mask);
    draw_version(&mut m, version);
    m
}

/// Encodes `payload` as a single segment in the narrowest mode.
pub fn encode_symbol(
    payload: &[u8],
    ec: EcLevel,
    mask_policy: MaskPolicy,
    version_policy: VersionPolicy,
) -> Result<EncodedSymbol, EncodeError> {
    let segments = [Segment::auto(payload)?];
    let version = match version_policy {
        VersionPolicy::Auto => choose_version(&segments, ec)?,
        VersionPolicy::Force(v) => v,
    };
    let data = assemble_codewords(&segments, version, ec)?;
    let codewords = interleave_blocks(&data, version, ec);

    let mut base = build_function_patterns(version);
    place_codewords(&mut base, &codewords);

    let (matrix, mask) = match mask_policy {
        MaskPolicy::Force(mask) => (finish(&base, version, ec, mask), mask),
        MaskPolicy::Auto => MaskId::all()
            .map(|mask| {
                let m = finish(&base, version, ec, mask);
                (penalty_score(&m), mask, m)
            })
            .min_by_key(|(score, mask, _)| (*score, *mask))
            .map(|(_, mask, m)| (m, mask))
            .expect("eight candidates"),
    };
    Ok(EncodedSymbol { matrix, version, ec, mask })
}
