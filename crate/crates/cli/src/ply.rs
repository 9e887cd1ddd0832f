//! PLY reader/writer (ascii and binary_little_endian).
//!
//! Writing uses binary_little_endian with f64 coordinates, so a write/read
//! round trip is bit-exact and point order is preserved.

use std::fs;
use std::io::Write;
use std::path::Path;

use roadtwin_core::geometry::TriMesh;
use roadtwin_core::math::{p3, Point3};
use roadtwin_core::model::RegisteredCloud;

use crate::{io_err, CliError, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
enum Scalar {
    I8,
    U8,
    I16,
    U16,
    I32,
    U32,
    F32,
    F64,
}

impl Scalar {
    fn parse(name: &str) -> Option<Scalar> {
        Some(match name {
            "char" | "int8" => Scalar::I8,
            "uchar" | "uint8" => Scalar::U8,
            "short" | "int16" => Scalar::I16,
            "ushort" | "uint16" => Scalar::U16,
            "int" | "int32" => Scalar::I32,
            "uint" | "uint32" => Scalar::U32,
            "float" | "float32" => Scalar::F32,
            "double" | "float64" => Scalar::F64,
            _ => return None,
        })
    }

    fn size(self) -> usize {
        match self {
            Scalar::I8 | Scalar::U8 => 1,
            Scalar::I16 | Scalar::U16 => 2,
            Scalar::I32 | Scalar::U32 | Scalar::F32 => 4,
            Scalar::F64 => 8,
        }
    }
}

#[derive(Debug, Clone)]
enum Property {
    Scalar { name: String, ty: Scalar },
    List { name: String, count: Scalar, item: Scalar },
}

#[derive(Debug, Clone)]
struct Element {
    name: String,
    count: usize,
    properties: Vec<Property>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
enum Format {
    Ascii,
    BinaryLittleEndian,
}

struct Header {
    format: Format,
    elements: Vec<Element>,
    body_offset: usize,
}

fn header_err(path: &Path, detail: impl Into<String>) -> CliError {
    CliError::PlyHeader {
        path: path.to_path_buf(),
        detail: detail.into(),
    }
}

fn parse_header(path: &Path, bytes: &[u8]) -> Result<Header> {
    let mut offset = 0usize;
    let mut lines = Vec::new();
    loop {
        let rest = &bytes[offset..];
        let end = rest
            .iter()
            .position(|&b| b == b'\n')
            .ok_or_else(|| header_err(path, "missing end_header"))?;
        let line = String::from_utf8_lossy(&rest[..end]).trim_end_matches('\r').to_string();
        offset += end + 1;
        if line == "end_header" {
            break;
        }
        lines.push(line);
        if offset > 65536 {
            return Err(header_err(path, "header too large"));
        }
    }
    let mut it = lines.iter();
    if it.next().map(String::as_str) != Some("ply") {
        return Err(header_err(path, "missing ply magic"));
    }
    let mut format = None;
    let mut elements: Vec<Element> = Vec::new();
    for line in it {
        let tokens: Vec<&str> = line.split_whitespace().collect();
        match tokens.as_slice() {
            ["comment", ..] | ["obj_info", ..] => {}
            ["format", fmt, "1.0"] => {
                format = Some(match *fmt {
                    "ascii" => Format::Ascii,
                    "binary_little_endian" => Format::BinaryLittleEndian,
                    other => {
                        return Err(header_err(path, format!("unsupported format {other:?}")))
                    }
                });
            }
            ["element", name, count] => {
                let count: usize = count
                    .parse()
                    .map_err(|_| header_err(path, format!("bad element count {count:?}")))?;
                elements.push(Element {
                    name: (*name).to_string(),
                    count,
                    properties: Vec::new(),
                });
            }
            ["property", "list", count_ty, item_ty, name] => {
                let element = elements
                    .last_mut()
                    .ok_or_else(|| header_err(path, "property before element"))?;
                let (Some(count), Some(item)) = (Scalar::parse(count_ty), Scalar::parse(item_ty))
                else {
                    return Err(CliError::PlyUnsupportedType {
                        path: path.to_path_buf(),
                        type_name: format!("{count_ty} {item_ty}"),
                        property: (*name).to_string(),
                    });
                };
                element.properties.push(Property::List {
                    name: (*name).to_string(),
                    count,
                    item,
                });
            }
            ["property", ty, name] => {
                let element = elements
                    .last_mut()
                    .ok_or_else(|| header_err(path, "property before element"))?;
                let Some(ty) = Scalar::parse(ty) else {
                    return Err(CliError::PlyUnsupportedType {
                        path: path.to_path_buf(),
                        type_name: (*ty).to_string(),
                        property: (*name).to_string(),
                    });
                };
                element.properties.push(Property::Scalar {
                    name: (*name).to_string(),
                    ty,
                });
            }
            _ => return Err(header_err(path, format!("unrecognized line {line:?}"))),
        }
    }
    Ok(Header {
        format: format.ok_or_else(|| header_err(path, "missing format line"))?,
        elements,
        body_offset: offset,
    })
}

/// Streaming scalar reader over the body, ascii or little-endian binary.
struct Body<'a> {
    path: &'a Path,
    format: Format,
    bytes: &'a [u8],
    cursor: usize,
    tokens: Vec<&'a str>,
    token_cursor: usize,
}

impl<'a> Body<'a> {
    fn new(path: &'a Path, format: Format, bytes: &'a [u8], offset: usize) -> Body<'a> {
        let (tokens, cursor) = match format {
            Format::Ascii => {
                let text = core::str::from_utf8(&bytes[offset..]).unwrap_or("");
                (text.split_whitespace().collect(), 0)
            }
            Format::BinaryLittleEndian => (Vec::new(), offset),
        };
        Body {
            path,
            format,
            bytes,
            cursor,
            tokens,
            token_cursor: 0,
        }
    }

    fn truncated(&self, expected: usize, what: &str) -> CliError {
        CliError::PlyTruncated {
            path: self.path.to_path_buf(),
            expected,
            what: what.to_string(),
        }
    }

    fn read(&mut self, ty: Scalar, what: &str) -> Result<f64> {
        match self.format {
            Format::Ascii => {
                let token = self
                    .tokens
                    .get(self.token_cursor)
                    .ok_or_else(|| self.truncated(1, what))?;
                self.token_cursor += 1;
                token
                    .parse::<f64>()
                    .map_err(|_| CliError::PlyHeader {
                        path: self.path.to_path_buf(),
                        detail: format!("bad ascii value {token:?} for {what}"),
                    })
            }
            Format::BinaryLittleEndian => {
                let size = ty.size();
                if self.cursor + size > self.bytes.len() {
                    return Err(self.truncated(self.cursor + size - self.bytes.len(), what));
                }
                let raw = &self.bytes[self.cursor..self.cursor + size];
                self.cursor += size;
                Ok(match ty {
                    Scalar::I8 => raw[0] as i8 as f64,
                    Scalar::U8 => raw[0] as f64,
                    Scalar::I16 => i16::from_le_bytes([raw[0], raw[1]]) as f64,
                    Scalar::U16 => u16::from_le_bytes([raw[0], raw[1]]) as f64,
                    Scalar::I32 => i32::from_le_bytes(raw.try_into().unwrap()) as f64,
                    Scalar::U32 => u32::from_le_bytes(raw.try_into().unwrap()) as f64,
                    Scalar::F32 => f32::from_le_bytes(raw.try_into().unwrap()) as f64,
                    Scalar::F64 => f64::from_le_bytes(raw.try_into().unwrap()),
                })
            }
        }
    }
}

/// Parsed PLY contents: vertices plus optional faces.
pub struct PlyContents {
    pub vertices: Vec<Point3>,
    pub faces: Vec<[u32; 3]>,
}

/// Reads a PLY file; vertex x/y/z must be float or double.
pub fn read_ply(path: &Path) -> Result<PlyContents> {
    let bytes = fs::read(path).map_err(|e| io_err(path, e))?;
    let header = parse_header(path, &bytes)?;
    let mut body = Body::new(path, header.format, &bytes, header.body_offset);
    let mut vertices = Vec::new();
    let mut faces = Vec::new();
    for element in &header.elements {
        if element.name == "vertex" {
            let mut x_idx = None;
            let mut y_idx = None;
            let mut z_idx = None;
            for (i, p) in element.properties.iter().enumerate() {
                if let Property::Scalar { name, ty } = p {
                    if name == "x" || name == "y" || name == "z" {
                        if !matches!(ty, Scalar::F32 | Scalar::F64) {
                            return Err(CliError::PlyUnsupportedType {
                                path: path.to_path_buf(),
                                type_name: format!("{ty:?}"),
                                property: name.clone(),
                            });
                        }
                        match name.as_str() {
                            "x" => x_idx = Some(i),
                            "y" => y_idx = Some(i),
                            _ => z_idx = Some(i),
                        }
                    }
                }
            }
            let (Some(xi), Some(yi), Some(zi)) = (x_idx, y_idx, z_idx) else {
                return Err(header_err(path, "vertex element missing x/y/z"));
            };
            for _ in 0..element.count {
                let mut coords = [0.0f64; 3];
                for (i, p) in element.properties.iter().enumerate() {
                    match p {
                        Property::Scalar { name, ty } => {
                            let v = body.read(*ty, name)?;
                            if i == xi {
                                coords[0] = v;
                            } else if i == yi {
                                coords[1] = v;
                            } else if i == zi {
                                coords[2] = v;
                            }
                        }
                        Property::List { name, count, item } => {
                            let n = body.read(*count, name)? as usize;
                            for _ in 0..n {
                                body.read(*item, name)?;
                            }
                        }
                    }
                }
                vertices.push(p3(coords[0], coords[1], coords[2]));
            }
        } else if element.name == "face" {
            for _ in 0..element.count {
                for p in &element.properties {
                    match p {
                        Property::List { name, count, item } => {
                            let n = body.read(*count, name)? as usize;
                            let mut idx = Vec::with_capacity(n);
                            for _ in 0..n {
                                idx.push(body.read(*item, name)? as u32);
                            }
                            if name == "vertex_indices" || name == "vertex_index" {
                                if idx.len() != 3 {
                                    return Err(header_err(
                                        path,
                                        format!("face with {} vertices (triangles only)", idx.len()),
                                    ));
                                }
                                faces.push([idx[0], idx[1], idx[2]]);
                            }
                        }
                        Property::Scalar { name, ty } => {
                            body.read(*ty, name)?;
                        }
                    }
                }
            }
        } else {
            // Skip unknown elements property by property.
            for _ in 0..element.count {
                for p in &element.properties {
                    match p {
                        Property::Scalar { name, ty } => {
                            body.read(*ty, name)?;
                        }
                        Property::List { name, count, item } => {
                            let n = body.read(*count, name)? as usize;
                            for _ in 0..n {
                                body.read(*item, name)?;
                            }
                        }
                    }
                }
            }
        }
    }
    Ok(PlyContents { vertices, faces })
}

/// Reads a point cloud (faces ignored).
pub fn read_cloud(path: &Path) -> Result<RegisteredCloud> {
    Ok(RegisteredCloud::from_points(read_ply(path)?.vertices))
}

/// Reads an indexed mesh.
pub fn read_mesh(path: &Path) -> Result<TriMesh> {
    let contents = read_ply(path)?;
    Ok(TriMesh::new(contents.vertices, contents.faces))
}

fn write_header(out: &mut Vec<u8>, vertices: usize, faces: Option<usize>) {
    out.extend_from_slice(b"ply\nformat binary_little_endian 1.0\n");
    out.extend_from_slice(format!("element vertex {vertices}\n").as_bytes());
    out.extend_from_slice(b"property double x\nproperty double y\nproperty double z\n");
    if let Some(faces) = faces {
        out.extend_from_slice(format!("element face {faces}\n").as_bytes());
        out.extend_from_slice(b"property list uchar int vertex_indices\n");
    }
    out.extend_from_slice(b"end_header\n");
}

fn write_file(path: &Path, bytes: &[u8]) -> Result<()> {
    if let Some(parent) = path.parent() {
        fs::create_dir_all(parent).map_err(|e| io_err(path, e))?;
    }
    let mut f = fs::File::create(path).map_err(|e| io_err(path, e))?;
    f.write_all(bytes).map_err(|e| io_err(path, e))
}

/// Writes a point cloud as binary_little_endian doubles (lossless).
pub fn write_cloud(path: &Path, cloud: &RegisteredCloud) -> Result<()> {
    let mut out = Vec::new();
    write_header(&mut out, cloud.points.len(), None);
    for p in &cloud.points {
        out.extend_from_slice(&p.x.to_le_bytes());
        out.extend_from_slice(&p.y.to_le_bytes());
        out.extend_from_slice(&p.z.to_le_bytes());
    }
    write_file(path, &out)
}

/// Writes an indexed mesh as binary_little_endian doubles (lossless).
pub fn write_mesh(path: &Path, mesh: &TriMesh) -> Result<()> {
    let mut out = Vec::new();
    write_header(&mut out, mesh.vertices.len(), Some(mesh.faces.len()));
    for p in &mesh.vertices {
        out.extend_from_slice(&p.x.to_le_bytes());
        out.extend_from_slice(&p.y.to_le_bytes());
        out.extend_from_slice(&p.z.to_le_bytes());
    }
    for f in &mesh.faces {
        out.push(3u8);
        for &v in f {
            out.extend_from_slice(&(v as i32).to_le_bytes());
        }
    }
    write_file(path, &out)
}
