#include <catch2/catch_amalgamated.hpp>

#include <algorithm>
#include <random>

#include "cdmn/vocabulary.hpp"

using namespace cdmn;

static const std::set<std::string> kDoctorTypes = {"Doctor", "Day", "Time", "Number"};

TEST_CASE("parse_signature") {
    SECTION("one argument") {
        Signature sig = parse_signature("nb nights of Doctor", kDoctorTypes, SymbolKind::Function);
        REQUIRE(sig.template_tokens == std::vector<std::string>{"nb", "nights", "of", "_"});
        REQUIRE(sig.arg_types == std::vector<std::string>{"Doctor"});
        REQUIRE(sig.canonical == "nb_nights_of_Doctor");
    }
    SECTION("argument detection is case sensitive") {
        Signature sig =
            parse_signature("present doctor on Day at Time", kDoctorTypes, SymbolKind::Function);
        REQUIRE(sig.arg_types == std::vector<std::string>{"Day", "Time"});
        REQUIRE(sig.template_tokens ==
                std::vector<std::string>{"present", "doctor", "on", "_", "at", "_"});
    }
    SECTION("three arguments") {
        Signature sig = parse_signature("Doctor is available on Day at Time", kDoctorTypes,
                                        SymbolKind::Relation);
        REQUIRE(sig.arg_types == std::vector<std::string>{"Doctor", "Day", "Time"});
    }
    SECTION("relation with no slots is an error") {
        try {
            parse_signature("is on leave", kDoctorTypes, SymbolKind::Relation);
            FAIL("expected NoArguments");
        } catch (const Error& e) {
            REQUIRE(e.code() == ErrorCode::NoArguments);
        }
    }
    SECTION("constants keep type names verbatim") {
        Signature sig = parse_signature("head Doctor", kDoctorTypes, SymbolKind::Constant);
        REQUIRE(sig.arg_types.empty());
        REQUIRE(sig.canonical == "head_Doctor");
    }
    SECTION("render reproduces the description up to whitespace") {
        for (const char* desc : {"nb nights of Doctor", "Doctor is available on Day at Time",
                                 "present doctor on Day at Time"}) {
            Signature sig = parse_signature(desc, kDoctorTypes, SymbolKind::Function);
            REQUIRE(sig.render() == desc);
        }
    }
}

static std::string doctor_glossary() {
    return "Glossary Type\n"
           "Name,Type,Values\n"
           "Doctor,string,\"Fleming, Freud, Heimlich, Eustachi, Golgi\"\n"
           "Day,string,\"d1, d2\"\n"
           "Time,string,\"morning, evening, night\"\n"
           "Number,int,[0..7]\n"
           "\n"
           "Glossary Function\n"
           "Name,Type\n"
           "nb nights of Doctor,Number\n"
           "nb shift of Doctor on Day,Number\n"
           "\n"
           "Glossary Constant\n"
           "Name,Type\n"
           "Head,Doctor\n"
           "\n"
           "Glossary Relation\n"
           "Name\n"
           "Doctor is on leave\n"
           "\n"
           "Glossary Boolean\n"
           "Name\n"
           "Complete\n";
}

TEST_CASE("build_vocabulary") {
    SECTION("doctor planning glossary") {
        Vocabulary v = build_vocabulary(segment_blocks(doctor_glossary()));
        REQUIRE(v.has_type("Doctor"));
        REQUIRE(v.has_type("Number"));
        REQUIRE(v.type("Doctor").domain.size() == 5);
        REQUIRE(v.type("Number").domain.size() == 8);
        REQUIRE(v.type("Number").is_numeric);
        REQUIRE(!v.type("Doctor").is_numeric);

        const Signature* f = v.find_symbol("nb_nights_of_Doctor");
        REQUIRE(f);
        REQUIRE(f->kind == SymbolKind::Function);
        REQUIRE(f->arg_types == std::vector<std::string>{"Doctor"});
        REQUIRE(f->result_type == "Number");

        const Signature* head = v.find_symbol("Head");
        REQUIRE(head);
        REQUIRE(head->kind == SymbolKind::Constant);
        REQUIRE(head->result_type == "Doctor");

        const Signature* leave = v.find_symbol("Doctor_is_on_leave");
        REQUIRE(leave);
        REQUIRE(leave->kind == SymbolKind::Relation);
        REQUIRE(leave->arg_types == std::vector<std::string>{"Doctor"});

        REQUIRE(v.find_symbol("Complete"));
        REQUIRE(v.auto_constants.at("Fleming") == "Doctor");
        REQUIRE(v.auto_constants.count("morning"));
    }
    SECTION("type-only glossary is valid") {
        Vocabulary v = build_vocabulary(
            segment_blocks(std::string("Glossary Type\nName,Type,Values\nColor,string,\"Red, Blue\"\n")));
        REQUIRE(v.has_type("Color"));
        REQUIRE(v.symbols.empty());
    }
    SECTION("missing type table") {
        try {
            build_vocabulary(segment_blocks(std::string("Glossary Boolean\nName\nDone\n")));
            FAIL("expected MissingTypeTable");
        } catch (const Error& e) {
            REQUIRE(e.code() == ErrorCode::MissingTypeTable);
        }
    }
    SECTION("clashing domain elements across types") {
        try {
            build_vocabulary(segment_blocks(std::string(
                "Glossary Type\nName,Type,Values\nA,string,\"x, y\"\nB,string,\"y, z\"\n")));
            FAIL("expected ClashingDomainElement");
        } catch (const Error& e) {
            REQUIRE(e.code() == ErrorCode::ClashingDomainElement);
        }
    }
    SECTION("unknown result type") {
        try {
            build_vocabulary(segment_blocks(std::string(
                "Glossary Type\nName,Type,Values\nA,string,\"x\"\n\n"
                "Glossary Constant\nName,Type\nc,Widget\n")));
            FAIL("expected UnknownType");
        } catch (const Error& e) {
            REQUIRE(e.code() == ErrorCode::UnknownType);
        }
    }
    SECTION("duplicate symbol") {
        try {
            build_vocabulary(segment_blocks(std::string(
                "Glossary Type\nName,Type,Values\nA,string,\"x\"\n\n"
                "Glossary Constant\nName,Type\nc,A\nc,A\n")));
            FAIL("expected DuplicateSymbol");
        } catch (const Error& e) {
            REQUIRE(e.code() == ErrorCode::DuplicateSymbol);
        }
    }
    SECTION("constant colliding with a domain element") {
        try {
            build_vocabulary(segment_blocks(std::string(
                "Glossary Type\nName,Type,Values\nA,string,\"x\"\n\n"
                "Glossary Constant\nName,Type\nx,A\n")));
            FAIL("expected DuplicateSymbol");
        } catch (const Error& e) {
            REQUIRE(e.code() == ErrorCode::DuplicateSymbol);
        }
    }
    SECTION("order independence within glossary tables") {
        std::string permuted =
            "Glossary Constant\n"
            "Name,Type\n"
            "Head,Doctor\n"
            "\n"
            "Glossary Boolean\n"
            "Name\n"
            "Complete\n"
            "\n"
            "Glossary Type\n"
            "Name,Type,Values\n"
            "Number,int,[0..7]\n"
            "Time,string,\"morning, evening, night\"\n"
            "Day,string,\"d1, d2\"\n"
            "Doctor,string,\"Fleming, Freud, Heimlich, Eustachi, Golgi\"\n"
            "\n"
            "Glossary Relation\n"
            "Name\n"
            "Doctor is on leave\n"
            "\n"
            "Glossary Function\n"
            "Name,Type\n"
            "nb shift of Doctor on Day,Number\n"
            "nb nights of Doctor,Number\n";
        Vocabulary a = build_vocabulary(segment_blocks(doctor_glossary()));
        Vocabulary b = build_vocabulary(segment_blocks(permuted));
        REQUIRE(a == b);
    }
}

TEST_CASE("resolve_symbol") {
    Vocabulary v = build_vocabulary(segment_blocks(doctor_glossary()));

    SECTION("function application phrase") {
        Resolution r = resolve_symbol("nb shift of Golgi on d2", v);
        REQUIRE(r.kind == Resolution::Kind::Symbol);
        REQUIRE(r.signature->canonical == "nb_shift_of_Doctor_on_Day");
        REQUIRE(r.args == std::vector<std::string>{"Golgi", "d2"});
    }
    SECTION("bare constant") {
        Resolution r = resolve_symbol("Head", v);
        REQUIRE(r.kind == Resolution::Kind::Symbol);
        REQUIRE(r.signature->canonical == "Head");
    }
    SECTION("boolean") {
        Resolution r = resolve_symbol("Complete", v);
        REQUIRE(r.signature->kind == SymbolKind::Boolean);
    }
    SECTION("auto constants resolve to their type") {
        for (const auto& [elem, type] : v.auto_constants) {
            Resolution r = resolve_symbol(elem, v);
            REQUIRE(r.kind == Resolution::Kind::AutoConstant);
            REQUIRE(r.element_type == type);
        }
    }
    SECTION("unresolvable phrase") {
        try {
            resolve_symbol("nonsense phrase", v);
            FAIL("expected UnresolvedSymbol");
        } catch (const Error& e) {
            REQUIRE(e.code() == ErrorCode::UnresolvedSymbol);
        }
    }
    SECTION("longest template wins") {
        Vocabulary w = build_vocabulary(segment_blocks(std::string(
            "Glossary Type\nName,Type,Values\nThing,string,\"rock, tree\"\nNumber,int,[0..9]\n\n"
            "Glossary Function\nName,Type\ncost of Thing,Number\ncost of Thing doubled,Number\n")));
        Resolution r = resolve_symbol("cost of rock doubled", w);
        REQUIRE(r.signature->canonical == "cost_of_Thing_doubled");
        REQUIRE(r.args == std::vector<std::string>{"rock"});
    }
    SECTION("equal-length templates are ambiguous") {
        Vocabulary w = build_vocabulary(segment_blocks(std::string(
            "Glossary Type\nName,Type,Values\nA,string,\"x\"\nB,string,\"y\"\n\n"
            "Glossary Relation\nName\nA is fine\nB is fine\n")));
        try {
            resolve_symbol("q is fine", w);
            FAIL("expected AmbiguousMatch");
        } catch (const Error& e) {
            REQUIRE(e.code() == ErrorCode::AmbiguousMatch);
        }
    }
}
