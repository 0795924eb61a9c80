//! Closed vocabularies: block kinds, code languages and picture classes.

use core::fmt;

macro_rules! closed_vocab {
    ($(#[$meta:meta])* $name:ident { $($variant:ident => $tag:literal),+ $(,)? }) => {
        $(#[$meta])*
        #[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
        pub enum $name {
            $($variant),+
        }

        impl $name {
            pub const ALL: &'static [$name] = &[$($name::$variant),+];

            /// Name as written inside the DocTags tag.
            pub const fn name(self) -> &'static str {
                match self {
                    $($name::$variant => $tag),+
                }
            }

            pub fn from_name(name: &str) -> Option<Self> {
                match name {
                    $($tag => Some($name::$variant),)+
                    _ => None,
                }
            }
        }

        impl fmt::Display for $name {
            fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
                f.write_str(self.name())
            }
        }

        #[cfg(feature = "serde")]
        impl serde::Serialize for $name {
            fn serialize<S: serde::Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
                s.serialize_str(self.name())
            }
        }

        #[cfg(feature = "serde")]
        impl<'de> serde::Deserialize<'de> for $name {
            fn deserialize<D: serde::Deserializer<'de>>(d: D) -> Result<Self, D::Error> {
                let name = <alloc::string::String as serde::Deserialize>::deserialize(d)?;
                $name::from_name(&name).ok_or_else(|| {
                    serde::de::Error::custom(alloc::format!(
                        concat!("unknown ", stringify!($name), " `{}`"),
                        name
                    ))
                })
            }
        }
    };
}

closed_vocab! {
    /// Element types that may appear as open/close tag pairs.
    BlockKind {
        Text => "text",
        Caption => "caption",
        Footnote => "footnote",
        Formula => "formula",
        Title => "title",
        ListItem => "list_item",
        PageFooter => "page_footer",
        PageHeader => "page_header",
        Picture => "picture",
        SectionHeader => "section_header",
        DocumentIndex => "document_index",
        Code => "code",
        Otsl => "otsl",
        OrderedList => "ordered_list",
        UnorderedList => "unordered_list",
    }
}

impl BlockKind {
    pub const fn is_list(self) -> bool {
        matches!(self, BlockKind::OrderedList | BlockKind::UnorderedList)
    }

    /// Code and formula content is kept byte for byte; everything else is
    /// trimmed prose.
    pub const fn is_verbatim(self) -> bool {
        matches!(self, BlockKind::Code | BlockKind::Formula)
    }

    /// Kinds whose body may hold OTSL cell tags.
    pub const fn holds_table(self) -> bool {
        matches!(self, BlockKind::Otsl | BlockKind::DocumentIndex)
    }

    /// Kinds that may carry a text payload.
    pub const fn holds_text(self) -> bool {
        !matches!(
            self,
            BlockKind::Otsl | BlockKind::OrderedList | BlockKind::UnorderedList
        )
    }

    /// Whether `child` may be nested directly under `self`.
    pub const fn admits_child(self, child: BlockKind) -> bool {
        match self {
            BlockKind::Picture => matches!(child, BlockKind::Caption | BlockKind::Otsl),
            BlockKind::Otsl => matches!(child, BlockKind::Caption),
            BlockKind::OrderedList | BlockKind::UnorderedList => {
                matches!(child, BlockKind::ListItem)
            }
            _ => false,
        }
    }
}

closed_vocab! {
    /// Programming language classification of a `code` block, written as
    /// `<_Name_>`.
    CodeLang {
        Ada => "Ada",
        Awk => "Awk",
        Bash => "Bash",
        Bc => "bc",
        C => "C",
        CSharp => "C#",
        Cpp => "C++",
        CMake => "CMake",
        Cobol => "COBOL",
        Css => "CSS",
        Ceylon => "Ceylon",
        Clojure => "Clojure",
        Crystal => "Crystal",
        Cuda => "Cuda",
        Cython => "Cython",
        D => "D",
        Dart => "Dart",
        Dc => "dc",
        Dockerfile => "Dockerfile",
        Elixir => "Elixir",
        Erlang => "Erlang",
        Fortran => "FORTRAN",
        Forth => "Forth",
        Go => "Go",
        Html => "HTML",
        Haskell => "Haskell",
        Haxe => "Haxe",
        Java => "Java",
        JavaScript => "JavaScript",
        Julia => "Julia",
        Kotlin => "Kotlin",
        Lisp => "Lisp",
        Lua => "Lua",
        Matlab => "Matlab",
        MoonScript => "MoonScript",
        Nim => "Nim",
        OCaml => "OCaml",
        ObjectiveC => "ObjectiveC",
        Octave => "Octave",
        Php => "PHP",
        Pascal => "Pascal",
        Perl => "Perl",
        Prolog => "Prolog",
        Python => "Python",
        Racket => "Racket",
        Ruby => "Ruby",
        Rust => "Rust",
        Sml => "SML",
        Sql => "SQL",
        Scala => "Scala",
        Scheme => "Scheme",
        Swift => "Swift",
        TypeScript => "TypeScript",
        Unknown => "unknown",
        VisualBasic => "VisualBasic",
        Xml => "XML",
        Yaml => "YAML",
    }
}

closed_vocab! {
    /// Image category attached to a `picture` block as a standalone tag.
    PictureClass {
        NaturalImage => "natural_image",
        PieChart => "pie_chart",
        BarChart => "bar_chart",
        LineChart => "line_chart",
        FlowChart => "flow_chart",
        ScatterChart => "scatter_chart",
        Heatmap => "heatmap",
        RemoteSensing => "remote_sensing",
        ChemistryMolecularStructure => "chemistry_molecular_structure",
        ChemistryMarkushStructure => "chemistry_markush_structure",
        Icon => "icon",
        Logo => "logo",
        Signature => "signature",
        Stamp => "stamp",
        QrCode => "qr_code",
        BarCode => "bar_code",
        Screenshot => "screenshot",
        Map => "map",
        StratigraphicChart => "stratigraphic_chart",
        CadDrawing => "cad_drawing",
        ElectricalDiagram => "electrical_diagram",
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn vocabulary_sizes() {
        assert_eq!(BlockKind::ALL.len(), 15);
        // 56 named languages plus `unknown`
        assert_eq!(CodeLang::ALL.len(), 57);
        assert_eq!(PictureClass::ALL.len(), 21);
    }

    #[test]
    fn names_round_trip() {
        for k in BlockKind::ALL {
            assert_eq!(BlockKind::from_name(k.name()), Some(*k));
        }
        for l in CodeLang::ALL {
            assert_eq!(CodeLang::from_name(l.name()), Some(*l));
        }
        for c in PictureClass::ALL {
            assert_eq!(PictureClass::from_name(c.name()), Some(*c));
        }
    }

    #[test]
    fn tag_names_are_case_sensitive() {
        assert_eq!(BlockKind::from_name("Text"), None);
        assert_eq!(CodeLang::from_name("python"), None);
        assert_eq!(CodeLang::from_name("C++"), Some(CodeLang::Cpp));
    }
}
