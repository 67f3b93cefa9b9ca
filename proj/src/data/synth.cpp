#include "latentwire/data/synth.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <cstdio>
#include <random>

#include "latentwire/rng.hpp"

namespace latentwire::data {

const std::vector<std::string>& nsl_kdd_feature_names() {
    static const std::vector<std::string> names{
        "duration", "protocol_type", "service", "flag", "src_bytes", "dst_bytes", "land", "wrong_fragment", "urgent",
        "hot", "num_failed_logins", "logged_in", "num_compromised", "root_shell", "su_attempted", "num_root",
        "num_file_creations", "num_shells", "num_access_files", "num_outbound_cmds", "is_host_login", "is_guest_login",
        "count", "srv_count", "serror_rate", "srv_serror_rate", "rerror_rate", "srv_rerror_rate", "same_srv_rate",
        "diff_srv_rate", "srv_diff_host_rate", "dst_host_count", "dst_host_srv_count", "dst_host_same_srv_rate",
        "dst_host_diff_srv_rate", "dst_host_same_src_port_rate", "dst_host_srv_diff_host_rate", "dst_host_serror_rate",
        "dst_host_srv_serror_rate", "dst_host_rerror_rate", "dst_host_srv_rerror_rate"};
    return names;
}

const std::vector<std::string>& nsl_kdd_attack_labels() {
    static const std::vector<std::string> labels{
        "back", "land", "neptune", "pod", "smurf", "teardrop", "apache2", "mailbomb", "processtable", "udpstorm",
        "ipsweep", "nmap", "portsweep", "satan", "mscan", "saint", "ftp_write", "guess_passwd", "imap", "multihop",
        "phf", "spy", "warezclient", "warezmaster", "sendmail", "named", "snmpgetattack", "snmpguess", "xlock",
        "xsnoop", "worm", "httptunnel", "buffer_overflow", "loadmodule", "perl", "rootkit", "ps", "sqlattack", "xterm"};
    return labels;
}

DatasetSchema nsl_kdd_schema(bool difficulty_column) {
    DatasetSchema s;
    s.name = difficulty_column ? "nsl_kdd_plus" : "nsl_kdd";
    for (const auto& n : nsl_kdd_feature_names()) {
        const bool cat = n == "protocol_type" || n == "service" || n == "flag";
        s.columns.push_back({n, cat ? ColumnKind::categorical : ColumnKind::numeric});
    }
    s.columns.push_back({"label", ColumnKind::label});
    if (difficulty_column) s.columns.push_back({"difficulty", ColumnKind::drop});
    s.attack_label_values.insert(nsl_kdd_attack_labels().begin(), nsl_kdd_attack_labels().end());
    s.normal_label_values = {"normal"};
    s.has_header = false;
    return s;
}

namespace {

const std::array<const char*, 20> kServices{"http",  "private", "domain_u", "smtp",   "ftp_data", "eco_i",  "other",
                                            "ecr_i", "telnet",  "finger",   "ftp",    "auth",     "uucp",   "pop_3",
                                            "imap4", "sunrpc",  "time",     "netbios_ns", "urp_i", "ntp_u"};
const std::array<const char*, 11> kFlags{"SF", "S0", "REJ", "RSTR", "RSTO", "SH", "S1", "S2", "S3", "OTH", "RSTOS0"};
const std::array<const char*, 3> kProtocols{"tcp", "udp", "icmp"};

enum Family { normal, dos, probe, r2l, u2r, kFamilies };

struct Gen {
    Rng rng;
    double u() { return std::uniform_real_distribution<double>(0.0, 1.0)(rng); }
    double normal01(double mean, double sd) { return std::clamp(std::normal_distribution<double>(mean, sd)(rng), 0.0, 1.0); }
    double lognormal(double mu, double sigma) { return std::lognormal_distribution<double>(mu, sigma)(rng); }
    std::size_t pick(std::initializer_list<double> weights) {
        return std::discrete_distribution<std::size_t>(weights)(rng);
    }
    long counts(double mean) { return std::poisson_distribution<long>(std::max(mean, 0.01))(rng); }
};

std::string fmt(double v) {
    char buf[32];
    if (v == std::floor(v) && std::fabs(v) < 1e15) std::snprintf(buf, sizeof buf, "%.0f", v);
    else std::snprintf(buf, sizeof buf, "%.2f", v);
    return buf;
}

const char* attack_name(Family f, Gen& g) {
    static const std::array<const char*, 4> dos_names{"neptune", "smurf", "back", "teardrop"};
    static const std::array<const char*, 4> probe_names{"satan", "ipsweep", "portsweep", "nmap"};
    static const std::array<const char*, 4> r2l_names{"guess_passwd", "warezclient", "warezmaster", "imap"};
    static const std::array<const char*, 3> u2r_names{"buffer_overflow", "rootkit", "perl"};
    switch (f) {
        case dos: return dos_names[g.pick({6, 3, 1, 1})];
        case probe: return probe_names[g.pick({3, 2, 2, 1})];
        case r2l: return r2l_names[g.pick({3, 3, 1, 1})];
        case u2r: return u2r_names[g.pick({3, 1, 1})];
        default: return "normal";
    }
}

// Connection statistics drawn from a family profile. `p` mixes towards the
// normal profile for stealthy attacks.
std::vector<std::string> record(Family f, bool stealthy, Gen& g) {
    const Family shape = stealthy ? normal : f;
    std::vector<std::string> v;
    v.reserve(42);
    std::size_t proto, service, flag;
    switch (shape) {
        case dos:
            proto = g.pick({6, 1, 3});
            service = g.pick({2, 6, 0, 1, 0, 1, 2, 3, 0, 0, 0, 0, 1, 0, 0, 0, 0, 0, 0, 0});
            flag = g.pick({2, 6, 2, 0, 0, 0, 0, 0, 0, 0, 0});
            break;
        case probe:
            proto = g.pick({5, 2, 3});
            service = g.pick({1, 4, 1, 0, 0, 4, 4, 1, 1, 1, 1, 1, 1, 0, 0, 1, 1, 1, 1, 0});
            flag = g.pick({3, 2, 4, 2, 2, 1, 0, 0, 0, 1, 1});
            break;
        case r2l:
            proto = g.pick({9, 1, 0.1});
            service = g.pick({1, 0, 0, 1, 4, 0, 1, 0, 3, 0, 4, 0, 0, 1, 2, 0, 0, 0, 0, 0});
            flag = g.pick({8, 0, 1, 0, 1, 0, 0.5, 0, 0, 0, 0});
            break;
        case u2r:
            proto = g.pick({9, 0.5, 0.1});
            service = g.pick({1, 0, 0, 0, 3, 0, 1, 0, 5, 0, 2, 0, 0, 0, 0, 0, 0, 0, 0, 0});
            flag = g.pick({9, 0, 0, 0, 0.5, 0, 0, 0, 0, 0, 0});
            break;
        default:
            proto = g.pick({8, 2, 1});
            service = g.pick({9, 1, 3, 3, 2, 1, 2, 1, 1, 1, 1, 1, 0.5, 1, 0.5, 0.2, 0.2, 0.2, 0.5, 0.5});
            flag = g.pick({12, 0.5, 0.7, 0.2, 0.2, 0.1, 0.2, 0.1, 0.1, 0.1, 0.05});
    }
    const bool sf = flag == 0;
    double duration = 0, src = 0, dst = 0, hot = 0, failed = 0, logged = 0, compromised = 0, root_shell = 0;
    double count = 0, srv_count = 0, serror = 0, rerror = 0, same_srv = 0, diff_srv = 0, dh_count = 0, dh_srv = 0;
    switch (shape) {
        case dos:
            duration = g.u() < 0.95 ? 0 : g.lognormal(1, 1);
            src = g.u() < 0.6 ? 0 : g.lognormal(6.5, 1.5);
            dst = g.u() < 0.8 ? 0 : g.lognormal(4, 2);
            count = 50 + g.counts(180);
            srv_count = 5 + g.counts(count * g.u() * 0.3);
            serror = g.normal01(flag == 1 ? 0.9 : 0.2, 0.15);
            rerror = g.normal01(flag == 2 ? 0.85 : 0.05, 0.1);
            same_srv = g.normal01(0.15, 0.15);
            diff_srv = g.normal01(0.07, 0.05);
            dh_count = 200 + g.counts(40);
            dh_srv = g.counts(25);
            break;
        case probe:
            duration = g.u() < 0.85 ? 0 : g.lognormal(3, 2);
            src = g.u() < 0.5 ? 0 : g.lognormal(3, 1.5);
            dst = g.u() < 0.7 ? 0 : g.lognormal(3, 1.5);
            count = 1 + g.counts(60);
            srv_count = 1 + g.counts(8);
            serror = g.normal01(0.1, 0.15);
            rerror = g.normal01(0.45, 0.3);
            same_srv = g.normal01(0.3, 0.3);
            diff_srv = g.normal01(0.55, 0.3);
            dh_count = 30 + g.counts(150);
            dh_srv = 1 + g.counts(10);
            break;
        case r2l:
            duration = g.u() < 0.4 ? 0 : g.lognormal(4, 2);
            src = g.lognormal(5.5, 2);
            dst = g.u() < 0.3 ? 0 : g.lognormal(6, 2.5);
            hot = g.counts(2.5);
            failed = g.u() < 0.3 ? 1 + g.counts(0.5) : 0;
            logged = g.u() < 0.6 ? 1 : 0;
            count = 1 + g.counts(3);
            srv_count = 1 + g.counts(3);
            same_srv = g.normal01(0.9, 0.15);
            diff_srv = g.normal01(0.05, 0.05);
            dh_count = 1 + g.counts(40);
            dh_srv = 1 + g.counts(20);
            break;
        case u2r:
            duration = g.lognormal(4.5, 1.5);
            src = g.lognormal(7, 1.5);
            dst = g.lognormal(7.5, 1.5);
            hot = 1 + g.counts(3);
            logged = 1;
            compromised = g.counts(2);
            root_shell = g.u() < 0.6 ? 1 : 0;
            count = 1 + g.counts(1);
            srv_count = 1 + g.counts(1);
            same_srv = g.normal01(0.95, 0.1);
            diff_srv = g.normal01(0.02, 0.03);
            dh_count = 1 + g.counts(20);
            dh_srv = 1 + g.counts(20);
            break;
        default:
            duration = g.u() < 0.8 ? 0 : g.lognormal(3.5, 2);
            src = g.lognormal(5.5, 1.6);
            dst = g.u() < 0.15 ? 0 : g.lognormal(7, 2);
            hot = g.u() < 0.1 ? g.counts(1.5) : 0;
            logged = g.u() < 0.75 ? 1 : 0;
            count = 1 + g.counts(8);
            srv_count = 1 + g.counts(10);
            serror = g.normal01(0.02, 0.05);
            rerror = g.normal01(0.03, 0.08);
            same_srv = g.normal01(0.92, 0.12);
            diff_srv = g.normal01(0.04, 0.06);
            dh_count = 10 + g.counts(140);
            dh_srv = 10 + g.counts(160);
    }
    dh_count = std::min(dh_count, 255.0);
    dh_srv = std::min(dh_srv, 255.0);
    count = std::min(count, 511.0);
    srv_count = std::min(srv_count, 511.0);
    if (!sf && shape == normal) logged = 0;

    v.push_back(fmt(std::round(duration)));
    v.push_back(kProtocols[proto]);
    v.push_back(kServices[service]);
    v.push_back(kFlags[flag]);
    v.push_back(fmt(std::round(src)));
    v.push_back(fmt(std::round(dst)));
    v.push_back(fmt(shape == dos && g.u() < 0.01 ? 1 : 0));  // land
    v.push_back(fmt(shape == dos && proto == 1 && g.u() < 0.2 ? 1 + g.counts(1) : 0));  // wrong_fragment
    v.push_back(fmt(shape == u2r && g.u() < 0.1 ? 1 : 0));  // urgent
    v.push_back(fmt(hot));
    v.push_back(fmt(failed));
    v.push_back(fmt(logged));
    v.push_back(fmt(compromised));
    v.push_back(fmt(root_shell));
    v.push_back(fmt(shape == u2r && g.u() < 0.2 ? 1 : 0));  // su_attempted
    v.push_back(fmt(shape == u2r ? g.counts(1.5) : 0));      // num_root
    v.push_back(fmt(shape == u2r || shape == r2l ? g.counts(0.6) : (g.u() < 0.02 ? 1 : 0)));
    v.push_back(fmt(shape == u2r ? g.counts(0.4) : 0));  // num_shells
    v.push_back(fmt(g.u() < (shape == u2r ? 0.3 : 0.01) ? 1 : 0));
    v.push_back("0");  // num_outbound_cmds is constant in the published data
    v.push_back("0");  // is_host_login
    v.push_back(fmt(shape == r2l && g.u() < 0.3 ? 1 : 0));
    v.push_back(fmt(count));
    v.push_back(fmt(srv_count));
    v.push_back(fmt(serror));
    v.push_back(fmt(g.normal01(serror, 0.05)));
    v.push_back(fmt(rerror));
    v.push_back(fmt(g.normal01(rerror, 0.05)));
    v.push_back(fmt(same_srv));
    v.push_back(fmt(diff_srv));
    v.push_back(fmt(g.normal01(shape == probe ? 0.3 : 0.1, 0.15)));
    v.push_back(fmt(dh_count));
    v.push_back(fmt(dh_srv));
    v.push_back(fmt(g.normal01(same_srv * 0.9, 0.1)));
    v.push_back(fmt(g.normal01(diff_srv, 0.08)));
    v.push_back(fmt(g.normal01(shape == probe ? 0.5 : 0.1, 0.2)));
    v.push_back(fmt(g.normal01(shape == probe ? 0.2 : 0.03, 0.05)));
    v.push_back(fmt(g.normal01(serror, 0.08)));
    v.push_back(fmt(g.normal01(serror, 0.08)));
    v.push_back(fmt(g.normal01(rerror, 0.08)));
    v.push_back(fmt(g.normal01(rerror, 0.08)));
    return v;
}

}  // namespace

std::string synth_nsl_kdd_csv(const SynthOptions& options) {
    Gen g{Rng(mix_seed(options.seed, 0x5EED))};
    std::string out;
    out.reserve(options.rows * 160);
    for (std::size_t i = 0; i < options.rows; ++i) {
        const bool attack = g.u() < options.attack_fraction;
        Family f = normal;
        if (attack) f = static_cast<Family>(1 + g.pick({0.62, 0.2, 0.15, 0.03}));
        const bool stealthy = attack && g.u() < 0.08;
        auto values = record(f, stealthy, g);
        bool labeled_attack = attack;
        if (g.u() < options.label_noise) labeled_attack = !labeled_attack;
        if (labeled_attack && f == normal) f = static_cast<Family>(1 + g.pick({0.62, 0.2, 0.15, 0.03}));
        values.push_back(labeled_attack ? attack_name(f, g) : "normal");
        if (options.difficulty_column) values.push_back(std::to_string(10 + g.pick({1, 1, 2, 3, 4, 5, 6, 8, 10, 12, 20})));
        for (std::size_t c = 0; c < values.size(); ++c) {
            if (c) out += ',';
            out += values[c];
        }
        out += '\n';
    }
    return out;
}

}  // namespace latentwire::data
