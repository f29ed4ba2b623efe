use std::path::Path;

use serde::{Deserialize, Serialize};

use super::PlatformError;

pub const PYTHON_JAVA: &str = "python_java";
pub const RPI_PYTHON: &str = "rpi_3b+_python";
pub const RPI_PYTHON_QUANTIZED: &str = "rpi_3b+_python_quantized";
pub const ARDUINO_NANO_33: &str = "arduino_nano_33_ble_sense_cpp";

/// Environment variable naming an extra platform file.
pub const PLATFORMS_ENV: &str = "MDML_PLATFORMS";
pub const DEFAULT_PROGRAM_RESERVE: u64 = 128 * 1024;

/// Which generator family produces code for a platform.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum TargetLanguage {
    /// Training and prediction scripts plus a Java messaging skeleton.
    PythonJava,
    /// Prediction script for a single-board computer.
    Python,
    /// Microcontroller sketch with an embedded model array.
    Cpp,
}

impl TargetLanguage {
    pub fn name(self) -> &'static str {
        match self {
            TargetLanguage::PythonJava => "python_java",
            TargetLanguage::Python => "python",
            TargetLanguage::Cpp => "cpp",
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct PlatformProfile {
    /// Matched against `@compiler` annotations.
    pub compiler_id: String,
    pub display_name: String,
    /// `None` means unconstrained.
    pub ram_bytes: Option<u64>,
    pub flash_bytes: Option<u64>,
    pub cpu_clock_hz: Option<u64>,
    pub language: TargetLanguage,
    pub ml_backend: String,
    pub quantized: bool,
    /// Flash kept free for the program image under the strict policy.
    pub program_reserve_bytes: u64,
}

impl PlatformProfile {
    pub fn is_unconstrained(&self) -> bool {
        self.ram_bytes.is_none() && self.flash_bytes.is_none()
    }

    pub fn description(&self) -> String {
        let mut parts = vec![self.display_name.clone()];
        if let Some(r) = self.ram_bytes {
            parts.push(format!("{} RAM", human_bytes(r)));
        }
        if let Some(f) = self.flash_bytes {
            parts.push(format!("{} flash", human_bytes(f)));
        }
        if let Some(c) = self.cpu_clock_hz {
            parts.push(format!("{} MHz", c / 1_000_000));
        }
        if self.quantized {
            parts.push("int8 model".into());
        }
        parts.join(", ")
    }
}

fn human_bytes(b: u64) -> String {
    const KIB: u64 = 1024;
    if b >= KIB * KIB * KIB && b.is_multiple_of(KIB * KIB * KIB) {
        format!("{} GiB", b / (KIB * KIB * KIB))
    } else if b >= KIB * KIB && b.is_multiple_of(KIB * KIB) {
        format!("{} MiB", b / (KIB * KIB))
    } else if b >= KIB && b.is_multiple_of(KIB) {
        format!("{} KiB", b / KIB)
    } else {
        format!("{b} B")
    }
}

/// The four built-in targets.
pub fn builtin_registry() -> Vec<PlatformProfile> {
    let gib = 1024 * 1024 * 1024;
    let rpi = |id: &str, name: &str, quantized: bool, backend: &str| PlatformProfile {
        compiler_id: id.into(),
        display_name: name.into(),
        ram_bytes: Some(gib),
        flash_bytes: None,
        cpu_clock_hz: Some(1_400_000_000),
        language: TargetLanguage::Python,
        ml_backend: backend.into(),
        quantized,
        program_reserve_bytes: DEFAULT_PROGRAM_RESERVE,
    };
    vec![
        PlatformProfile {
            compiler_id: PYTHON_JAVA.into(),
            display_name: "x86 workstation (Python + Java)".into(),
            ram_bytes: None,
            flash_bytes: None,
            cpu_clock_hz: None,
            language: TargetLanguage::PythonJava,
            ml_backend: "keras".into(),
            quantized: false,
            program_reserve_bytes: DEFAULT_PROGRAM_RESERVE,
        },
        rpi(RPI_PYTHON, "Raspberry Pi 3 Model B+ (Python)", false, "keras"),
        rpi(
            RPI_PYTHON_QUANTIZED,
            "Raspberry Pi 3 Model B+ (Python, quantized)",
            true,
            "tflite",
        ),
        PlatformProfile {
            compiler_id: ARDUINO_NANO_33.into(),
            display_name: "Arduino Nano 33 BLE Sense (C++)".into(),
            ram_bytes: Some(256 * 1024),
            flash_bytes: Some(1024 * 1024),
            cpu_clock_hz: Some(64_000_000),
            language: TargetLanguage::Cpp,
            ml_backend: "tflite_micro".into(),
            quantized: true,
            program_reserve_bytes: DEFAULT_PROGRAM_RESERVE,
        },
    ]
}

/// Profiles keyed by compiler id, kept sorted.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Registry {
    profiles: Vec<PlatformProfile>,
}

impl Default for Registry {
    fn default() -> Self {
        Self::builtin()
    }
}

impl Registry {
    pub fn builtin() -> Self {
        let mut profiles = builtin_registry();
        profiles.sort_by(|a, b| a.compiler_id.cmp(&b.compiler_id));
        Registry { profiles }
    }

    /// Built-ins plus the file named by `MDML_PLATFORMS`, if set.
    pub fn from_env() -> Result<Self, PlatformError> {
        let mut reg = Self::builtin();
        if let Some(path) = std::env::var_os(PLATFORMS_ENV) {
            reg.load_file(Path::new(&path))?;
        }
        Ok(reg)
    }

    pub fn register(&mut self, profile: PlatformProfile) -> Result<(), PlatformError> {
        if profile.compiler_id.is_empty() {
            return Err(PlatformError::Invalid {
                id: profile.compiler_id,
                message: "compiler_id must not be empty".into(),
            });
        }
        if profile.ram_bytes == Some(0) || profile.flash_bytes == Some(0) {
            return Err(PlatformError::Invalid {
                id: profile.compiler_id,
                message: "memory budgets must be positive".into(),
            });
        }
        match self
            .profiles
            .binary_search_by(|p| p.compiler_id.as_str().cmp(&profile.compiler_id))
        {
            Ok(_) => Err(PlatformError::Duplicate(profile.compiler_id)),
            Err(i) => {
                self.profiles.insert(i, profile);
                Ok(())
            }
        }
    }

    pub fn lookup(&self, compiler_id: &str) -> Option<&PlatformProfile> {
        self.profiles
            .binary_search_by(|p| p.compiler_id.as_str().cmp(compiler_id))
            .ok()
            .map(|i| &self.profiles[i])
    }

    pub fn profiles(&self) -> &[PlatformProfile] {
        &self.profiles
    }

    pub fn ids(&self) -> Vec<&str> {
        self.profiles.iter().map(|p| p.compiler_id.as_str()).collect()
    }

    pub fn load_file(&mut self, path: &Path) -> Result<(), PlatformError> {
        let file = path.display().to_string();
        let text = std::fs::read_to_string(path).map_err(|e| PlatformError::File {
            file: file.clone(),
            message: e.to_string(),
        })?;
        self.load_str(&text).map_err(|e| match e {
            PlatformError::File { message, .. } => PlatformError::File { file, message },
            other => other,
        })
    }

    /// Registers every `[[platform]]` table of a TOML document.
    pub fn load_str(&mut self, text: &str) -> Result<(), PlatformError> {
        let file_err = |message: String| PlatformError::File {
            file: "<input>".into(),
            message,
        };
        let doc: PlatformFile = toml::from_str(text).map_err(|e| file_err(e.to_string()))?;
        for raw in doc.platform {
            let id = raw.compiler_id.clone();
            let invalid = |message: String| PlatformError::Invalid {
                id: id.clone(),
                message,
            };
            let size = |v: &Option<SizeValue>, what: &str| -> Result<Option<u64>, PlatformError> {
                v.as_ref()
                    .map(|v| v.bytes().map_err(|m| invalid(format!("{what}: {m}"))))
                    .transpose()
            };
            let ram_bytes = size(&raw.ram, "ram")?;
            let flash_bytes = size(&raw.flash, "flash")?;
            let program_reserve_bytes =
                size(&raw.program_reserve, "program_reserve")?.unwrap_or(DEFAULT_PROGRAM_RESERVE);
            let cpu_clock_hz = raw
                .clock
                .as_ref()
                .map(|c| c.hertz().map_err(|m| invalid(format!("clock: {m}"))))
                .transpose()?;
            let language = raw.language.unwrap_or(if flash_bytes.is_some() {
                TargetLanguage::Cpp
            } else {
                TargetLanguage::Python
            });
            let ml_backend = raw.ml_backend.unwrap_or_else(|| {
                match (language, raw.quantized) {
                    (TargetLanguage::Cpp, _) => "tflite_micro",
                    (_, true) => "tflite",
                    _ => "keras",
                }
                .into()
            });
            self.register(PlatformProfile {
                display_name: raw.name.unwrap_or_else(|| raw.compiler_id.clone()),
                compiler_id: raw.compiler_id,
                ram_bytes,
                flash_bytes,
                cpu_clock_hz,
                language,
                ml_backend,
                quantized: raw.quantized,
                program_reserve_bytes,
            })?;
        }
        Ok(())
    }
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct PlatformFile {
    #[serde(default)]
    platform: Vec<RawProfile>,
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct RawProfile {
    compiler_id: String,
    name: Option<String>,
    ram: Option<SizeValue>,
    flash: Option<SizeValue>,
    clock: Option<SizeValue>,
    #[serde(default)]
    quantized: bool,
    language: Option<TargetLanguage>,
    ml_backend: Option<String>,
    program_reserve: Option<SizeValue>,
}

#[derive(Deserialize)]
#[serde(untagged)]
enum SizeValue {
    Int(i64),
    Text(String),
}

impl SizeValue {
    fn bytes(&self) -> Result<u64, String> {
        match self {
            SizeValue::Int(i) => u64::try_from(*i).map_err(|_| format!("{i} is negative")),
            SizeValue::Text(s) => parse_size(s),
        }
    }

    fn hertz(&self) -> Result<u64, String> {
        match self {
            SizeValue::Int(i) => u64::try_from(*i).map_err(|_| format!("{i} is negative")),
            SizeValue::Text(s) => parse_clock(s),
        }
    }
}

fn split_number(s: &str) -> Result<(f64, String), String> {
    let s = s.trim();
    let idx = s.find(|c: char| !(c.is_ascii_digit() || c == '.')).unwrap_or(s.len());
    let (num, unit) = s.split_at(idx);
    let value: f64 = num.parse().map_err(|_| format!("'{s}' does not start with a number"))?;
    Ok((value, unit.trim().to_string()))
}

fn scaled(value: f64, factor: u64, original: &str) -> Result<u64, String> {
    let v = value * factor as f64;
    if v.fract() != 0.0 || v > u64::MAX as f64 {
        return Err(format!("'{original}' is not a whole number of units"));
    }
    Ok(v as u64)
}

/// `512`, `512B`, `256KB` (10^3), `256KiB` (2^10), `1MB`, `1MiB`, `1GB`, `1GiB`.
pub fn parse_size(s: &str) -> Result<u64, String> {
    let (value, unit) = split_number(s)?;
    let factor: u64 = match unit.as_str() {
        "" | "B" => 1,
        "KB" | "kB" => 1_000,
        "MB" => 1_000_000,
        "GB" => 1_000_000_000,
        "KiB" => 1 << 10,
        "MiB" => 1 << 20,
        "GiB" => 1 << 30,
        other => return Err(format!("unknown size unit '{other}'")),
    };
    scaled(value, factor, s)
}

/// `64000000`, `64MHz`, `1.4GHz`, `32kHz`, `100Hz`.
pub fn parse_clock(s: &str) -> Result<u64, String> {
    let (value, unit) = split_number(s)?;
    let factor: u64 = match unit.as_str() {
        "" | "Hz" => 1,
        "kHz" | "KHz" => 1_000,
        "MHz" => 1_000_000,
        "GHz" => 1_000_000_000,
        other => return Err(format!("unknown clock unit '{other}'")),
    };
    scaled(value, factor, s)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn builtins() {
        let reg = Registry::builtin();
        assert_eq!(reg.profiles().len(), 4);
        assert_eq!(reg.lookup(ARDUINO_NANO_33).unwrap().flash_bytes, Some(1_048_576));
        assert_eq!(reg.lookup(ARDUINO_NANO_33).unwrap().ram_bytes, Some(262_144));
        assert!(reg.lookup(PYTHON_JAVA).unwrap().is_unconstrained());
        assert_eq!(reg.lookup(RPI_PYTHON).unwrap().ram_bytes, Some(1 << 30));
        assert!(reg.lookup(RPI_PYTHON_QUANTIZED).unwrap().quantized);
        assert!(reg.lookup("bogus").is_none());
        let ids = reg.ids();
        let mut sorted = ids.clone();
        sorted.sort();
        assert_eq!(ids, sorted);
    }

    #[test]
    fn sizes_and_clocks() {
        assert_eq!(parse_size("256KB"), Ok(256_000));
        assert_eq!(parse_size("256KiB"), Ok(262_144));
        assert_eq!(parse_size("1MB"), Ok(1_000_000));
        assert_eq!(parse_size("1MiB"), Ok(1_048_576));
        assert_eq!(parse_size("1.5KiB"), Ok(1536));
        assert!(parse_size("3 parsecs").is_err());
        assert!(parse_size("0.3B").is_err());
        assert_eq!(parse_clock("1.4GHz"), Ok(1_400_000_000));
        assert_eq!(parse_clock("64MHz"), Ok(64_000_000));
    }

    #[test]
    fn user_file() {
        let mut reg = Registry::builtin();
        reg.load_str(
            r#"
[[platform]]
compiler_id = "esp32_cpp"
ram = "520KiB"
flash = "4MB"
clock = "240MHz"
quantized = true
"#,
        )
        .unwrap();
        let p = reg.lookup("esp32_cpp").unwrap();
        assert_eq!(p.ram_bytes, Some(520 * 1024));
        assert_eq!(p.flash_bytes, Some(4_000_000));
        assert_eq!(p.language, TargetLanguage::Cpp);
        assert_eq!(reg.ids()[0], ARDUINO_NANO_33);
        let dup = reg.load_str("[[platform]]\ncompiler_id = \"python_java\"\n");
        assert!(matches!(dup, Err(PlatformError::Duplicate(_))));
        assert!(reg.load_str("[[platform]]\ncompiler_id = \"x\"\nspeed = 3\n").is_err());
    }
}
