// Two-process integration: spawns the ksrt binary as initiator and
// responder over loopback and checks that both emit identical keys.
//
//   argv[1] = path to the ksrt binary
//   argv[2] = scratch directory

#include <sys/types.h>
#include <sys/wait.h>
#include <unistd.h>

#include <cstdio>
#include <cstdlib>
#include <cstring>
#include <fstream>
#include <sstream>
#include <string>
#include <vector>

namespace {

int failures = 0;

#define REQUIRE(cond, msg)                                            \
    do {                                                              \
        if (!(cond)) {                                                \
            std::fprintf(stderr, "[FAIL] %s:%d %s\n", __FILE__, __LINE__, msg); \
            ++failures;                                               \
        }                                                             \
    } while (0)

pid_t spawn(const std::vector<std::string>& args) {
    const pid_t pid = fork();
    if (pid != 0) return pid;
    std::vector<char*> argv;
    for (const auto& a : args) argv.push_back(const_cast<char*>(a.c_str()));
    argv.push_back(nullptr);
    execv(argv[0], argv.data());
    std::perror("execv");
    _exit(127);
}

int wait_exit(pid_t pid) {
    int status = 0;
    waitpid(pid, &status, 0);
    return WIFEXITED(status) ? WEXITSTATUS(status) : -1;
}

std::string slurp(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    std::ostringstream buffer;
    buffer << in.rdbuf();
    return buffer.str();
}

// Pulls one value out of a key,value report CSV.
std::string report_value(const std::string& csv, const std::string& key) {
    std::istringstream lines(csv);
    std::string line;
    while (std::getline(lines, line)) {
        if (line.rfind(key + ",", 0) == 0) return line.substr(key.size() + 1);
    }
    return "<missing>";
}

void simulated_chain_over_loopback(const std::string& binary, const std::string& dir) {
    const std::string session = "00112233445566778899aabbccddeeff";
    const std::string init_key = dir + "/initiator.key";
    const std::string resp_key = dir + "/responder.key";

    const pid_t responder = spawn({binary, "--mode", "keygen-responder",
                                   "--listen", "127.0.0.1:46710",
                                   "--session-id", session,
                                   "--rounds", "30000",
                                   "--topology", "default", "--seed", "7",
                                   "--out", resp_key, "--format", "raw"});
    usleep(200000);
    const pid_t initiator = spawn({binary, "--mode", "keygen-initiator",
                                   "--peer", "127.0.0.1:46710",
                                   "--session-id", session,
                                   "--rounds", "30000",
                                   "--topology", "default", "--seed", "7",
                                   "--out", init_key, "--format", "raw"});

    REQUIRE(wait_exit(initiator) == 0, "initiator exited nonzero");
    REQUIRE(wait_exit(responder) == 0, "responder exited nonzero");

    const std::string a = slurp(init_key);
    const std::string b = slurp(resp_key);
    REQUIRE(!a.empty(), "initiator key file empty");
    REQUIRE(a == b, "key files differ");

    // Raw format: 4-byte big-endian bit count, then the packed bytes.
    REQUIRE(a.size() >= 4, "raw key file shorter than its length prefix");
    const uint32_t bits = (static_cast<uint32_t>(static_cast<uint8_t>(a[0])) << 24) |
                          (static_cast<uint32_t>(static_cast<uint8_t>(a[1])) << 16) |
                          (static_cast<uint32_t>(static_cast<uint8_t>(a[2])) << 8) |
                          static_cast<uint32_t>(static_cast<uint8_t>(a[3]));
    REQUIRE(bits > 0, "raw key holds zero bits");
    REQUIRE(a.size() == 4 + (bits + 7) / 8, "raw key length disagrees with its prefix");

    const std::string ra = slurp(init_key + ".report.csv");
    const std::string rb = slurp(resp_key + ".report.csv");
    for (const char* key : {"rounds", "union_discards", "ties", "raw_bits",
                            "plan_total_iterations", "plan_pa_block_size",
                            "final_key_bits"}) {
        const std::string va = report_value(ra, key);
        const std::string vb = report_value(rb, key);
        REQUIRE(va == vb, (std::string("report field diverges: ") + key).c_str());
        REQUIRE(va != "<missing>", (std::string("report field missing: ") + key).c_str());
    }
    REQUIRE(report_value(ra, "final_key_bits") != "0", "empty key");
    std::fprintf(stdout, "[ok] simulated chain over loopback: %s bits\n",
                 report_value(ra, "final_key_bits").c_str());
}

void live_udp_over_loopback(const std::string& binary, const std::string& dir) {
    // Real loopback timing noise drives this one, so the BER is not
    // controlled; both sides must either finish with identical keys or
    // refuse with the same named cause.
    const std::string session = "ffeeddccbbaa99887766554433221100";
    const std::string init_key = dir + "/live-initiator.key";
    const std::string resp_key = dir + "/live-responder.key";

    const pid_t responder = spawn({binary, "--mode", "keygen-responder",
                                   "--listen", "127.0.0.1:46720",
                                   "--session-id", session,
                                   "--rounds", "25000",
                                   "--out", resp_key, "--format", "hex"});
    usleep(200000);
    const pid_t initiator = spawn({binary, "--mode", "keygen-initiator",
                                   "--peer", "127.0.0.1:46720",
                                   "--session-id", session,
                                   "--rounds", "25000",
                                   "--out", init_key, "--format", "hex"});

    const int ec_init = wait_exit(initiator);
    const int ec_resp = wait_exit(responder);

    if (ec_init == 0 && ec_resp == 0) {
        const std::string a = slurp(init_key);
        REQUIRE(!a.empty(), "live initiator key file empty");
        REQUIRE(a == slurp(resp_key), "live key files differ");
        std::fprintf(stdout, "[ok] live UDP loopback: agreed on a key\n");
    } else {
        // An abort must be a clean, mutual one (exit code 2 = named
        // session abort), never a crash or a one-sided success.
        REQUIRE(ec_init == 2, "initiator failed with an unexpected code");
        REQUIRE(ec_resp == 2, "responder failed with an unexpected code");
        REQUIRE(slurp(init_key).empty(), "aborted run left a key file");
        std::fprintf(stdout, "[ok] live UDP loopback: clean mutual refusal\n");
    }
}

void absent_responder_refuses(const std::string& binary, const std::string& dir) {
    const pid_t initiator = spawn({binary, "--mode", "keygen-initiator",
                                   "--peer", "127.0.0.1:46799",
                                   "--session-id", "00000000000000000000000000000001",
                                   "--rounds", "100",
                                   "--timeout-ms", "30",
                                   "--out", dir + "/nobody.key"});
    REQUIRE(wait_exit(initiator) != 0, "initiator should fail without a responder");
    REQUIRE(slurp(dir + "/nobody.key").empty(), "failed run left a key file");
    std::fprintf(stdout, "[ok] absent responder refused\n");
}

} // namespace

int main(int argc, char** argv) {
    if (argc < 3) {
        std::fprintf(stderr, "usage: %s <ksrt-binary> <scratch-dir>\n", argv[0]);
        return 2;
    }
    const std::string binary = argv[1];
    const std::string dir = argv[2];

    simulated_chain_over_loopback(binary, dir);
    live_udp_over_loopback(binary, dir);
    absent_responder_refuses(binary, dir);

    if (failures == 0) {
        std::fprintf(stdout, "integration: all checks passed\n");
        return 0;
    }
    std::fprintf(stderr, "integration: %d failures\n", failures);
    return 1;
}
