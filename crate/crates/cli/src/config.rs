//! `key = value` experiment files with section headers.

use ini::Ini;

use crate::error::CliError;

/// Keys accepted in each section.
const SCHEMA: &[(&str, &[&str])] = &[
    ("graph", &["family", "type", "radius"]),
    ("run", &["steps", "threads", "check_l95", "inject", "eq", "list"]),
    ("grigorchuk", &["ball", "schreier", "verify_lifts", "z_check"]),
    ("output", &["csv", "out"]),
];

/// Every setting a subcommand may read. Unset fields fall back to the
/// subcommand's defaults.
#[derive(Clone, Debug, Default, PartialEq)]
pub struct Settings {
    pub family: Option<String>,
    pub tiling_type: Option<String>,
    pub radius: Option<usize>,
    pub steps: Option<usize>,
    pub threads: Option<usize>,
    pub check_l95: bool,
    pub inject: Option<String>,
    pub eq: Option<String>,
    pub list: bool,
    pub ball: Option<usize>,
    pub schreier: Option<usize>,
    pub verify_lifts: Option<usize>,
    pub z_check: bool,
    pub csv: Option<String>,
    pub out: Option<String>,
}

impl Settings {
    pub fn from_file(path: &str) -> Result<Self, CliError> {
        let text = std::fs::read_to_string(path).map_err(|e| CliError::Config(format!("{path}: {e}")))?;
        Self::parse(&text)
    }

    pub fn parse(text: &str) -> Result<Self, CliError> {
        let ini = Ini::load_from_str(text).map_err(|e| CliError::Config(e.to_string()))?;
        let mut s = Settings::default();
        for (section, props) in ini.iter() {
            let Some(section) = section else {
                if let Some((k, _)) = props.iter().next() {
                    return Err(CliError::Config(format!("key `{k}` must sit under a section header")));
                }
                continue;
            };
            let keys = SCHEMA
                .iter()
                .find(|(name, _)| *name == section)
                .map(|(_, k)| *k)
                .ok_or_else(|| CliError::Config(format!("unknown section [{section}]")))?;
            for (k, v) in props.iter() {
                if !keys.contains(&k) {
                    return Err(CliError::Config(format!("unknown key `{k}` in [{section}]")));
                }
                s.set(k, v.trim())?;
            }
        }
        Ok(s)
    }

    fn set(&mut self, key: &str, v: &str) -> Result<(), CliError> {
        let num = |v: &str| v.parse::<usize>().map_err(|_| CliError::Config(format!("`{key}` needs an integer, got `{v}`")));
        let flag = |v: &str| match v {
            "true" | "yes" | "1" => Ok(true),
            "false" | "no" | "0" => Ok(false),
            _ => Err(CliError::Config(format!("`{key}` needs true or false, got `{v}`"))),
        };
        match key {
            "family" => self.family = Some(v.into()),
            "type" => self.tiling_type = Some(v.into()),
            "radius" => self.radius = Some(num(v)?),
            "steps" => self.steps = Some(num(v)?),
            "threads" => self.threads = Some(num(v)?),
            "check_l95" => self.check_l95 = flag(v)?,
            "inject" => self.inject = Some(v.into()),
            "eq" => self.eq = Some(v.into()),
            "list" => self.list = flag(v)?,
            "ball" => self.ball = Some(num(v)?),
            "schreier" => self.schreier = Some(num(v)?),
            "verify_lifts" => self.verify_lifts = Some(num(v)?),
            "z_check" => self.z_check = flag(v)?,
            "csv" => self.csv = Some(v.into()),
            "out" => self.out = Some(v.into()),
            _ => unreachable!("key checked against schema"),
        }
        Ok(())
    }

    /// Values set in `over` win.
    pub fn overlay(mut self, over: Settings) -> Settings {
        macro_rules! take {
            ($($f:ident),*) => { $( if over.$f.is_some() { self.$f = over.$f; } )* };
        }
        take!(family, tiling_type, radius, steps, threads, inject, eq, ball, schreier, verify_lifts, csv, out);
        self.check_l95 |= over.check_l95;
        self.list |= over.list;
        self.z_check |= over.z_check;
        self
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn sections_and_keys() {
        let s = Settings::parse("[graph]\nfamily = ladder\nradius = 12\n[run]\nsteps = 9\ncheck_l95 = yes\n").unwrap();
        assert_eq!(s.family.as_deref(), Some("ladder"));
        assert_eq!((s.radius, s.steps, s.check_l95), (Some(12), Some(9), true));
        assert!(matches!(Settings::parse("[graph]\ncolour = red\n"), Err(CliError::Config(_))));
        assert!(matches!(Settings::parse("[plots]\nx = 1\n"), Err(CliError::Config(_))));
        assert!(matches!(Settings::parse("steps = 3\n"), Err(CliError::Config(_))));
        assert!(matches!(Settings::parse("[run]\nsteps = many\n"), Err(CliError::Config(_))));
    }

    #[test]
    fn flags_override_file() {
        let file = Settings { steps: Some(4), radius: Some(9), ..Default::default() };
        let cli = Settings { steps: Some(7), ..Default::default() };
        let s = file.overlay(cli);
        assert_eq!((s.steps, s.radius), (Some(7), Some(9)));
    }
}
