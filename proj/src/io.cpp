#include "rslab/io.hpp"

#include <cmath>
#include <cstdio>
#include <fstream>

namespace rslab {

std::string format_full(double v) {
    char buf[64];
    std::snprintf(buf, sizeof(buf), "%.17g", v);
    return buf;
}

json finite_or_null(double v) {
    if (!std::isfinite(v)) return nullptr;
    return v;
}

json measure_to_json(const AtomicMeasure& mu) {
    json arr = json::array();
    for (const Atom& a : mu.atoms()) {
        arr.push_back(json{{"location", a.location}, {"weight", a.weight}});
    }
    return arr;
}

AtomicMeasure measure_from_json(const json& j) {
    if (!j.is_array()) throw PreconditionError("measure: expected an array of atoms");
    AtomicMeasure mu;
    for (const json& e : j) {
        if (!e.is_object() || !e.contains("location") || !e.contains("weight"))
            throw PreconditionError("measure: each atom needs location and weight");
        for (const auto& [key, val] : e.items()) {
            (void)val;
            if (key != "location" && key != "weight")
                throw PreconditionError("measure: unknown atom key '" + key + "'");
        }
        Point loc = e.at("location").get<Point>();
        mu.add(std::move(loc), e.at("weight").get<double>());
    }
    return mu;
}

std::string samples_csv(const EnsembleReport& report) {
    std::string out = "index,tv,tau,admissible,sup_norm,iterations,residual\n";
    for (const SampleRecord& r : report.records) {
        out += std::to_string(r.index);
        out += ',';
        out += format_full(r.tv);
        out += ',';
        out += format_full(r.tau);
        out += ',';
        out += r.admissible ? '1' : '0';
        out += ',';
        out += format_full(r.sup_norm);
        out += ',';
        out += std::to_string(r.iterations);
        out += ',';
        out += format_full(r.residual);
        out += '\n';
    }
    return out;
}

std::string field_csv(const GridField& field) {
    const GridLayout& L = *field.layout();
    const int n = L.domain().dim();
    std::string out;
    for (int d = 0; d < n; ++d) {
        out += 'x';
        out += std::to_string(d);
        out += ',';
    }
    out += "value\n";
    for (size_t i = 0; i < L.size(); ++i) {
        const double* x = L.node(i);
        for (int d = 0; d < n; ++d) {
            out += format_full(x[d]);
            out += ',';
        }
        out += format_full(field[i]);
        out += '\n';
    }
    return out;
}

std::string clt_sums_csv(const CltReport& report) {
    std::string out = "trial,sum\n";
    for (size_t t = 0; t < report.sums.size(); ++t) {
        out += std::to_string(t);
        out += ',';
        out += format_full(report.sums[t]);
        out += '\n';
    }
    return out;
}

std::string lln_sums_csv(const LlnReport& report) {
    std::string out = "trial,deviation\n";
    for (size_t t = 0; t < report.deviations.size(); ++t) {
        out += std::to_string(t);
        out += ',';
        out += format_full(report.deviations[t]);
        out += '\n';
    }
    return out;
}

std::string borel_cantelli_csv(const BorelCantelliReport& report) {
    std::string out = "k,exceed_prob,partial_sum\n";
    for (size_t i = 0; i < report.exceed_prob.size(); ++i) {
        out += std::to_string(i + 1);
        out += ',';
        out += format_full(report.exceed_prob[i]);
        out += ',';
        out += format_full(report.partial_sums[i]);
        out += '\n';
    }
    return out;
}

void write_text_file(const std::string& path, const std::string& content) {
    std::ofstream f(path, std::ios::binary);
    if (!f) throw Error("cannot open for writing: " + path);
    f << content;
    if (!f.good()) throw Error("write failed: " + path);
}

}  // namespace rslab
