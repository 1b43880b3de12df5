#include "logstamp/datagen.hpp"

#include <algorithm>
#include <cctype>
#include <cstdio>
#include <fstream>
#include <functional>

#include "logstamp/errors.hpp"
#include "logstamp/rng.hpp"

namespace logstamp {

namespace {

struct TemplateDef {
    const char* pattern; // literal words and %kind variable slots
    double weight;
};

// -------------------------------------------------------------------------
// template inventories, one per system flavor
// -------------------------------------------------------------------------

const std::vector<TemplateDef>& hdfs_templates() {
    static const std::vector<TemplateDef> defs = {
        {"Receiving block %blk src: %ipport dest: %ipport", 25.0},
        {"BLOCK* NameSystem.addStoredBlock: blockMap updated: %ipport is added to %blk size %bytes", 21.0},
        {"PacketResponder %num3 for block %blk terminating", 16.0},
        {"Received block %blk of size %bytes from %ip", 12.0},
        {"BLOCK* NameSystem.allocateBlock: %path %blk", 8.0},
        {"Deleting block %blk file %path", 5.0},
        {"BLOCK* ask %ipport to delete %blk", 4.0},
        {"Verification succeeded for %blk", 3.0},
        {"BLOCK* NameSystem.delete: %blk is added to invalidSet of %ipport", 2.5},
        {"Exception in receiveBlock for block %blk java.io.IOException: Connection reset by peer", 1.5},
        {"PacketResponder %blk %num3 Exception java.io.InterruptedIOException: Interrupted receive", 1.0},
        {"Changing block file offset of block %blk from %bytes to %bytes meta file offset to %bytes", 0.7},
        {"Unexpected error trying to delete block %blk. BlockInfo not found in volumeMap.", 0.25},
        {"Adding an already existing block %blk", 0.15},
    };
    return defs;
}

const std::vector<TemplateDef>& proxifier_templates() {
    static const std::vector<TemplateDef> defs = {
        {"%prog - %host:%port open through proxy proxy.example.com:1080 HTTPS", 30.0},
        {"%prog - %host:%port close, %bytes bytes sent, %bytes bytes received, lifetime %sec sec", 29.0},
        {"%prog - %host:%port open directly", 8.0},
        {"%prog - proxy.example.com:1080 open through proxy proxy.example.com:1080 SOCKS5", 5.0},
        {"%prog - %host:%port error : Could not connect through proxy proxy.example.com:1080 - Proxy server cannot establish a connection with the target, status code 403", 2.0},
        {"%prog *64 - %host:%port open through proxy proxy.example.com:1080 HTTPS", 1.6},
        {"%prog - %host:%port close, %bytes bytes (%kb KB) sent, %bytes bytes (%kb KB) received, lifetime %sec sec", 1.2},
        {"%prog - %host:%port error : A connection request was canceled before the completion", 0.5},
    };
    return defs;
}

const std::vector<TemplateDef>& zookeeper_templates() {
    static const std::vector<TemplateDef> defs = {
        {"Received connection request %ipport", 16.0},
        {"Accepted socket connection from %ipport", 14.0},
        {"Closed socket connection for client %ipport which had sessionid %hex", 12.0},
        {"Client attempting to establish new session at %ipport", 10.0},
        {"Established session %hex with negotiated timeout %num for client %ipport", 9.0},
        {"Closed socket connection for client %ipport (no session established for client)", 7.0},
        {"Processed session termination for sessionid: %hex", 6.0},
        {"Expiring session %hex, timeout of %num ms exceeded", 5.0},
        {"Client session timed out, have not heard from server in %num ms for sessionid %hex, closing socket connection and attempting reconnect", 4.0},
        {"caught end of stream exception EndOfStreamException: Unable to read additional data from client sessionid %hex, likely client has closed socket", 3.5},
        {"Invalid session %hex for client %ipport, probably expired", 3.0},
        {"Connection request from old client %ipport; will be dropped if server is in r-o mode", 2.8},
        {"Opening socket connection to server %host. Will not attempt to authenticate using SASL (unknown error)", 2.6},
        {"Socket connection established to %host, initiating session", 2.4},
        {"Session establishment complete on server %host, sessionid = %hex, negotiated timeout = %num", 2.2},
        {"Unable to read additional data from server sessionid %hex, likely server has closed socket, closing socket connection and attempting reconnect", 2.0},
        {"Got user-level KeeperException when processing sessionid:%hex type:create cxid:%hex zxid:%hex txntype:-1 reqpath:n/a Error Path:%path Error:KeeperErrorCode = NodeExists for %path", 1.9},
        {"Notification: %num (n.leader), %hex (n.zxid), %num (n.round), LOOKING (n.state), %num (n.sid), LOOKING (my state)", 1.8},
        {"Connection broken for id %num, my id = %num, error =", 1.7},
        {"Interrupting SendWorker", 1.6},
        {"Interrupted while waiting for message on queue", 1.5},
        {"Send worker leaving thread", 1.4},
        {"Sending snapshot last zxid of peer is %hex", 1.2},
        {"Snapshotting: %hex to %path", 1.1},
        {"Reading snapshot %path", 1.0},
        {"My election bind port: %ipport", 0.9},
        {"New election. My id = %num, proposed zxid=%hex", 0.8},
        {"FOLLOWING - LEADER ELECTION TOOK - %num", 0.7},
        {"LEADING - LEADER ELECTION TOOK - %num", 0.6},
        {"Server state: LOOKING", 0.55},
        {"Server state: FOLLOWING", 0.4},
        {"Follower sid: %num : info : org.apache.zookeeper.server.quorum.LearnerHandler@%hex", 0.35},
        {"Revalidating client: %hex", 0.3},
        {"shutdown of request processor complete", 0.25},
        {"Created server with tickTime %num minSessionTimeout %num maxSessionTimeout %num datadir %path snapdir %path", 0.15},
        {"zookeeper.snapCount set to %num", 0.1},
    };
    return defs;
}

const std::vector<TemplateDef>& bgl_templates() {
    static const std::vector<TemplateDef> defs = {
        {"instruction cache parity error corrected", 15.0},
        {"generating core.%num", 13.0},
        {"ciod: Error reading message prefix after LOGIN_MESSAGE on CioStream socket to %ipport: Link has been severed", 10.0},
        {"%num double-hummer alignment exceptions", 9.0},
        {"ciod: failed to read message prefix on control stream CioStream socket to %ipport", 8.0},
        {"CE sym %num, at %hex, mask %hex", 7.0},
        {"data TLB error interrupt", 6.0},
        {"machine check interrupt", 5.0},
        {"total of %num ddr error(s) detected and corrected", 4.5},
        {"ddr: excessive soft failures, consider replacing the ddr memory on this card", 4.0},
        {"MidplaneSwitchController performing bit sparing on %node bit %num", 3.5},
        {"ciod: LOGIN chdir(%path) failed: No such file or directory", 3.0},
        {"program interrupt: fp compare instruction caused a program interrupt", 2.6},
        {"external input interrupt (unit=%hex bit=%hex): uncorrectable torus error", 2.4},
        {"rts: kernel terminated for reason %num", 2.2},
        {"idoproxy communication failure: socket closed", 2.0},
        {"mmcs_server exited abnormally due to signal: Aborted", 1.9},
        {"L3 ecc control register: %hex", 1.8},
        {"memory manager address parity error", 1.7},
        {"wait state enable.......................%num", 1.6},
        {"floating point instr. enabled...........%num", 1.5},
        {"general purpose registers:", 1.4},
        {"special purpose registers:", 1.3},
        {"machine state register: machine check enable", 1.2},
        {"instruction address: %hex", 1.1},
        {"data address: %hex", 1.05},
        {"NFS Mount failed on %node, slept %num seconds, retrying (%num)", 1.0},
        {"Error receiving packet on tree network, expecting type %num instead of type %num (softheader)", 0.95},
        {"auxiliary processor........................%num", 0.9},
        {"fpr%num=%hex %hex", 0.85},
        {"r%num=%hex", 0.8},
        {"lr:%hex cr:%hex xer:%hex ctr:%hex", 0.75},
        {"byte ordering exception...................%num", 0.7},
        {"critical input interrupt (unit=%hex bit=%hex): warning for torus y+ wire", 0.65},
        {"ciod: In packet from node %node, message code %num is not %num or 4294967295", 0.6},
        {"ciod: sending unexpected SIGKILL to message handler for node %node", 0.55},
        {"shutdown complete", 0.5},
        {"power module status fault detected on node card. status registers are: %hex %hex", 0.45},
        {"problem state (0=sup,1=usr).............%num", 0.4},
        {"connection lost to node card, unit %node", 0.38},
        {"icache prefetch depth has been set to %num", 0.35},
        {"lustre mount FAILED : %node : point %path", 0.32},
        {"start initialization phase %num", 0.3},
        {"monitor caught java.lang.IllegalStateException: while executing MONITOR operation", 0.28},
        {"capture first error address enable......%num", 0.25},
        {"DeclareServiceNetworkCharacteristics has been run but the service network is already declared", 0.2},
        {"exception syndrome register: %hex", 0.15},
        {"kernel panic on node %node", 0.1},
    };
    return defs;
}

const std::vector<TemplateDef>& hadoop_templates() {
    static const std::vector<TemplateDef> defs = {
        {"Progress of TaskAttempt %attempt is : %float", 16.0},
        {"%attempt TaskAttempt Transitioned from RUNNING to SUCCESS_CONTAINER_CLEANUP", 10.0},
        {"Assigned container %container to %attempt", 9.0},
        {"Done acknowledgement from %attempt", 8.0},
        {"Task succeeded with attempt %attempt", 7.0},
        {"%attempt TaskAttempt Transitioned from ASSIGNED to RUNNING", 6.5},
        {"%attempt TaskAttempt Transitioned from SUCCESS_CONTAINER_CLEANUP to SUCCEEDED", 6.0},
        {"task_%job_m_%num6 Task Transitioned from RUNNING to SUCCEEDED", 5.5},
        {"Num completed Tasks: %num", 5.0},
        {"JVM with ID : jvm_%job_m_%num6 asked for a task", 4.5},
        {"JVM with ID: jvm_%job_m_%num6 given task: %attempt", 4.0},
        {"Saved output of task '%attempt' to %path", 3.5},
        {"Processing the event EventType: CONTAINER_REMOTE_CLEANUP for container %container taskAttempt %attempt", 3.0},
        {"KILLING %attempt", 2.8},
        {"Releasing unassigned and invalid container %container. RM may have assignment issues", 2.5},
        {"Recovered input record seq: %num next start: %num", 2.2},
        {"Moved tmp output file to %path", 2.0},
        {"attempt_%job_r_%num6_0 TaskAttempt Transitioned from UNASSIGNED to ASSIGNED", 1.9},
        {"Reduce slow start threshold not met. completedMapsForReduceSlowstart %num", 1.8},
        {"Event Writer setup for JobId: job_%job, File: %path", 1.7},
        {"Netty Http Shuffle Version: 1.8", 1.6},
        {"Adding job token for job_%job to jobTokenSecretManager", 1.5},
        {"Default file system [hdfs://msra-sa-41:9000]", 1.4},
        {"Container container_%job_01_%num6 transitioned from RUNNING to COMPLETE", 1.3},
        {"Memory usage of ProcessTree %num for container-id container_%job_01_%num6: %float MB of %num GB physical memory used", 1.2},
        {"Starting resource-monitoring for container_%job_01_%num6", 1.1},
        {"Stopping resource-monitoring for container_%job_01_%num6", 1.0},
        {"IPC Server handler %num3 on %port, call org.apache.hadoop.mapred.TaskUmbilicalProtocol.statusUpdate from %ipport Call#%num Retry#0", 0.9},
        {"Scheduling a redundant attempt for task %attempt", 0.85},
        {"Error contacting RM. java.io.IOException: Failed on local exception", 0.8},
        {"DISKS FAILED. LOST LOCAL DIRS: %path", 0.7},
        {"Cannot locate map output for %attempt, fetch failure", 0.65},
        {"Failed to renew lease for DFSClient_NONMAPREDUCE_%num_%num3. Will retry shortly", 0.6},
        {"ShuffleHandler shuffle error : java.io.IOException: Broken pipe", 0.55},
        {"Retrying connect to server: %host/%ipport. Already tried %num3 time(s); retry policy is RetryUpToMaximumCountWithFixedSleep", 0.5},
        {"yarn.nodemanager.container-metrics.unregister-delay-ms is deprecated", 0.45},
        {"Using mapred newApiCommitter.", 0.4},
        {"Waiting for all reducers to finish", 0.35},
        {"CustomOutputCommitter skipping cleanupJob", 0.3},
        {"Job job_%job failed with state FAILED due to: Task failed %attempt", 0.25},
        {"Ignoring unknown event type: JOB_AM_REBOOT", 0.2},
        {"Kill job job_%job received from user at %ip", 0.1},
    };
    return defs;
}

// -------------------------------------------------------------------------
// variable value pools
// -------------------------------------------------------------------------

struct ValuePools {
    std::vector<std::string> ips, ipports, ports, hosts, progs, paths, hexes, nodes, blks, jobs;

    ValuePools(Rng& rng, int richness) {
        char buf[128];
        auto fmt = [&](const char* f, auto... args) {
            std::snprintf(buf, sizeof(buf), f, args...);
            return std::string(buf);
        };
        for (int i = 0; i < 3 * richness; ++i)
            ips.push_back(fmt("10.%d.%d.%d", int(rng.below(250)), int(rng.below(250)),
                              int(rng.below(250))));
        for (int i = 0; i < 3 * richness; ++i)
            ports.push_back(fmt("%d", 1024 + int(rng.below(60000))));
        for (int i = 0; i < 6 * richness; ++i)
            ipports.push_back("/" + ips[rng.below(ips.size())] + ":" +
                              ports[rng.below(ports.size())]);
        static const char* host_stems[] = {"mesos-slave", "minint", "node", "worker", "msra-sa",
                                           "datanode", "edge", "compute"};
        for (int i = 0; i < 3 * richness; ++i)
            hosts.push_back(fmt("%s-%02d.example.com", host_stems[rng.below(8)],
                                int(rng.below(90))));
        static const char* prog_names[] = {"chrome.exe",   "firefox.exe", "svchost.exe",
                                           "dropbox.exe",  "outlook.exe", "skype.exe",
                                           "python.exe",   "telegram.exe", "thunder.exe",
                                           "explorer.exe"};
        for (const char* p : prog_names) progs.emplace_back(p);
        static const char* segs[] = {"user", "root",  "data", "mnt",   "tmp",  "var",
                                     "log",  "spool", "jobs", "tasks", "out",  "part",
                                     "app",  "cache", "lib",  "share", "work", "scratch"};
        for (int i = 0; i < 5 * richness; ++i) {
            std::string p;
            const int depth = 2 + int(rng.below(3));
            for (int k = 0; k < depth; ++k) p += "/" + std::string(segs[rng.below(18)]);
            p += fmt("/f%04d", int(rng.below(10000)));
            paths.push_back(std::move(p));
        }
        for (int i = 0; i < 10 * richness; ++i) {
            std::string h = "0x";
            for (int k = 0; k < 12; ++k) h.push_back("0123456789abcdef"[rng.below(16)]);
            hexes.push_back(std::move(h));
        }
        for (int i = 0; i < 3 * richness; ++i)
            nodes.push_back(fmt("R%02d-M%d-N%d", int(rng.below(64)), int(rng.below(2)),
                                int(rng.below(16))));
        for (int i = 0; i < 120 * richness; ++i)
            blks.push_back(fmt("blk_%s%llu", rng.below(4) == 0 ? "-" : "",
                               static_cast<unsigned long long>(
                                   1000000000000ULL + rng.next_u64() % 9000000000000000ULL)));
        for (int i = 0; i < 2 * richness; ++i)
            jobs.push_back(fmt("14452144%03d_%04d", int(rng.below(1000)), int(rng.below(40))));
    }
};

class LineBuilder {
public:
    LineBuilder(Rng& rng, ValuePools& pools) : rng_(rng), pools_(pools) {}

    std::string instantiate(const std::string& pattern) {
        std::string out;
        std::size_t i = 0;
        while (i < pattern.size()) {
            std::size_t sp = pattern.find(' ', i);
            if (sp == std::string::npos) sp = pattern.size();
            std::string piece = pattern.substr(i, sp - i);
            if (!out.empty()) out.push_back(' ');
            out += expand_piece(piece);
            i = sp + 1;
        }
        return out;
    }

private:
    std::string pick(const std::vector<std::string>& pool) {
        return pool[rng_.below(pool.size())];
    }

    std::string expand_kind(const std::string& kind) {
        char buf[96];
        auto fmt = [&](const char* f, auto... args) {
            std::snprintf(buf, sizeof(buf), f, args...);
            return std::string(buf);
        };
        if (kind == "num") return fmt("%d", int(rng_.below(100000)));
        if (kind == "num3") return fmt("%d", int(rng_.below(1000)));
        if (kind == "num6") return fmt("%06d", int(rng_.below(1000000)));
        if (kind == "bytes") return fmt("%d", int(rng_.below(10000000)));
        if (kind == "kb") return fmt("%d", int(rng_.below(10000)));
        if (kind == "float") return fmt("%d.%02d", int(rng_.below(100)), int(rng_.below(100)));
        if (kind == "sec") return fmt("%d.%03d", int(rng_.below(600)), int(rng_.below(1000)));
        if (kind == "ip") return pick(pools_.ips);
        if (kind == "ipport") return pick(pools_.ipports);
        if (kind == "port") return pick(pools_.ports);
        if (kind == "host") return pick(pools_.hosts);
        if (kind == "prog") return pick(pools_.progs);
        if (kind == "path") return pick(pools_.paths);
        if (kind == "hex") return pick(pools_.hexes);
        if (kind == "node") return pick(pools_.nodes);
        if (kind == "blk") return pick(pools_.blks);
        if (kind == "job") return pick(pools_.jobs);
        if (kind == "attempt")
            return "attempt_" + pick(pools_.jobs) + fmt("_m_%06d_%d", int(rng_.below(1000000)),
                                                        int(rng_.below(4)));
        if (kind == "container")
            return "container_" + pick(pools_.jobs) + fmt("_01_%06d", int(rng_.below(1000000)));
        throw_error(ErrorKind::Parameter, "datagen: unknown variable kind %" + kind);
    }

    // every %kind inside a whitespace piece expands, literals stay put
    std::string expand_piece(const std::string& piece) {
        std::string out;
        std::size_t i = 0;
        while (i < piece.size()) {
            const std::size_t pct = piece.find('%', i);
            if (pct == std::string::npos) {
                out += piece.substr(i);
                break;
            }
            out += piece.substr(i, pct - i);
            std::size_t end = pct + 1;
            while (end < piece.size() &&
                   (std::isalnum(static_cast<unsigned char>(piece[end])) != 0))
                ++end;
            out += expand_kind(piece.substr(pct + 1, end - pct - 1));
            i = end;
        }
        return out;
    }

    Rng& rng_;
    ValuePools& pools_;
};

const std::vector<TemplateDef>& inventory(const std::string& name) {
    if (name == "HDFS") return hdfs_templates();
    if (name == "Proxifier") return proxifier_templates();
    if (name == "Zookeeper") return zookeeper_templates();
    if (name == "BGL") return bgl_templates();
    if (name == "Hadoop") return hadoop_templates();
    throw_error(ErrorKind::Parameter, "datagen: unknown dataset name: " + name);
}

struct GeneratedLine {
    std::string content;
    std::string event_id;
};

std::vector<GeneratedLine> generate_lines(const std::string& name, int lines,
                                          std::uint64_t seed) {
    if (lines < 1) throw_error(ErrorKind::Parameter, "datagen: lines must be >= 1");
    const auto& defs = inventory(name);
    Rng rng(derive_seed(seed, std::hash<std::string>{}(name)));
    ValuePools pools(rng, 12);
    LineBuilder builder(rng, pools);

    std::vector<double> cumulative;
    cumulative.reserve(defs.size());
    double total = 0.0;
    for (const auto& def : defs) {
        total += def.weight;
        cumulative.push_back(total);
    }

    std::vector<GeneratedLine> out;
    out.reserve(static_cast<std::size_t>(lines));
    for (int i = 0; i < lines; ++i) {
        const double x = rng.uniform(0.0, total);
        const std::size_t idx = static_cast<std::size_t>(
            std::lower_bound(cumulative.begin(), cumulative.end(), x) - cumulative.begin());
        GeneratedLine line;
        line.content = builder.instantiate(defs[idx].pattern);
        line.event_id = "E" + std::to_string(idx + 1);
        out.push_back(std::move(line));
    }
    return out;
}

std::string csv_quote_field(const std::string& s) {
    if (s.find_first_of(",\"\n\r") == std::string::npos) return s;
    std::string out = "\"";
    for (char c : s) {
        if (c == '"') out += "\"\"";
        else out.push_back(c);
    }
    out.push_back('"');
    return out;
}

} // namespace

std::vector<std::string> synthetic_dataset_names() {
    return {"HDFS", "Proxifier", "Zookeeper", "BGL", "Hadoop"};
}

bool is_synthetic_dataset_name(const std::string& name) {
    for (const auto& n : synthetic_dataset_names())
        if (n == name) return true;
    return false;
}

Dataset generate_synthetic_dataset(const std::string& name, int lines, std::uint64_t seed,
                                   const TokenizerConfig& tokenizer) {
    const auto generated = generate_lines(name, lines, seed);
    std::vector<std::string> contents, truths;
    contents.reserve(generated.size());
    truths.reserve(generated.size());
    for (const auto& g : generated) {
        contents.push_back(g.content);
        truths.push_back(g.event_id);
    }
    return dataset_from_lines(contents, tokenizer, name, truths);
}

void write_synthetic_csv(const std::string& path, const std::string& name, int lines,
                         std::uint64_t seed) {
    const auto generated = generate_lines(name, lines, seed);
    std::ofstream f(path, std::ios::trunc);
    if (!f) throw_error(ErrorKind::Input, "cannot open for writing: " + path);
    f << "LineId,Content,EventId\n";
    for (std::size_t i = 0; i < generated.size(); ++i)
        f << (i + 1) << ',' << csv_quote_field(generated[i].content) << ','
          << generated[i].event_id << '\n';
}

} // namespace logstamp
